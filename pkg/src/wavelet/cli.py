"""Command-line front end.

Exit codes: verify returns 0 valid, 1 invalid, 2 malformed; usage errors
exit 64 and I/O errors exit 74.
"""
import argparse
import os
import sys
import time

from . import params as params_mod
from .keygen import (MalformedKey, deserialize_pk, deserialize_sk, keygen,
                     public_payload_len, secret_payload_len, serialize_pk, serialize_sk)
from .params import ConfigError, get_params, tables_for
from .sigcodec import (CODEC_NAMES, MalformedSignature, decode_signature, encode_signature,
                       payload_size, recompress)
from .signer import sign, signer_rng
from .verifier import (FileRowSource, MalformedSignature as VerifyMalformed, MemoryRowSource,
                       RowSourceError, verify_report)

EXIT_OK, EXIT_INVALID, EXIT_MALFORMED = 0, 1, 2
EXIT_USAGE, EXIT_IO = 64, 74


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _read(path):
    with open(path, "rb") as fh:
        return fh.read()


def _write(path, data):
    with open(path, "wb") as fh:
        fh.write(data)


def _codec(name):
    if name.lower() not in CODEC_NAMES:
        raise UsageError(f"unknown codec {name!r} (use 2tmr or 3tmr)")
    return CODEC_NAMES[name.lower()]


def _load_tables(p, path):
    if path is None and p.insecure_toy:
        return tables_for(p)
    return tables_for(p, path or params_mod.default_table_path(p))


def cmd_keygen(args):
    p = get_params(args.params)
    if args.seed == "random":
        seed = os.urandom(p.seed_bytes)
    else:
        try:
            seed = bytes.fromhex(args.seed)
        except ValueError:
            raise UsageError("seed must be hex or 'random'") from None
        if len(seed) != p.seed_bytes:
            raise UsageError(f"seed must be {p.seed_bytes} bytes for {p.name}")
    sk, pk = keygen(seed, p)
    skb = serialize_sk(sk, seed_only=args.seed_only)
    pkb = serialize_pk(pk)
    _write(args.out_sk, skb)
    _write(args.out_pk, pkb)
    print(f"params={p.name}")
    print(f"sk_bytes={len(skb)}")
    print(f"pk_bytes={len(pkb)}")
    print(f"pk_payload_bytes={public_payload_len(p)}")
    return EXIT_OK


def cmd_sign(args):
    try:
        sk = deserialize_sk(_read(args.sk))
    except MalformedKey as exc:
        print(f"malformed secret key: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    tables = _load_tables(sk.params, args.tables)
    sig = sign(_read(args.infile), sk, tables, signer_rng())
    data = encode_signature(sig, sk.params, _codec(args.codec))
    _write(args.out, data)
    print(f"signature_bytes={len(data)}")
    print(f"payload_bytes={payload_size(data)}")
    return EXIT_OK


def _verify_file(pk_path, message, sig_bytes, stream):
    sig, sp, _ = decode_signature(sig_bytes)
    if stream:
        src = FileRowSource(pk_path)
    else:
        src = MemoryRowSource(deserialize_pk(_read(pk_path)))
    try:
        if src.params != sp:
            raise MalformedSignature("signature and key use different parameter sets")
        return verify_report(message, sig, src)
    finally:
        if stream:
            src.close()


def cmd_verify(args):
    message = _read(args.infile)
    sig_bytes = _read(args.sig)
    try:
        report = _verify_file(args.pk, message, sig_bytes, args.stream)
    except (MalformedSignature, VerifyMalformed, MalformedKey) as exc:
        print(f"malformed: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    print("valid" if report.valid else "invalid")
    return EXIT_OK if report.valid else EXIT_INVALID


def cmd_recompress(args):
    try:
        out = recompress(_read(args.infile), _codec(args.codec))
    except MalformedSignature as exc:
        print(f"malformed: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    _write(args.out, out)
    print(f"signature_bytes={len(out)}")
    return EXIT_OK


def cmd_params_show(args):
    p = get_params(args.id)
    rows = [("name", p.name), ("param_id", f"{p.param_id:#04x}"), ("lambda", p.lam), ("q", p.q),
            ("n", p.n), ("w", p.w), ("k", p.k), ("k_U", p.k_U), ("k_V", p.k_V), ("d", p.d),
            ("n_minus_k", p.r), ("t_min", p.t_min), ("t_max", p.t_max),
            ("insecure_toy", str(p.insecure_toy).lower()),
            ("pk_payload_bytes", public_payload_len(p)), ("sk_payload_bytes", secret_payload_len(p))]
    for k, v in rows:
        print(f"{k}={'' if v is None else v}")
    return EXIT_OK


def cmd_tables_check(args):
    p = get_params(args.params)
    path = args.tables or params_mod.default_table_path(p)
    t = params_mod.load_tables(path, p)
    lo, hi = p.t_range()
    print(f"params={p.name}")
    print(f"path={path}")
    print(f"t_range={lo}..{hi}")
    print(f"f_V_entries={len(t.f_V)}")
    print(f"f_U_rows={len(t.f_U)}")
    print(f"v_acceptance={float(t.acceptance_v()):.6f}")
    print("status=ok")
    return EXIT_OK


def cmd_bench_verify(args):
    pk_bytes = _read(args.pk)
    pk = deserialize_pk(pk_bytes)
    p = pk.params
    if args.sk:
        sk = deserialize_sk(_read(args.sk))
        tables = _load_tables(p, args.tables)
        rng = signer_rng()
        jobs = []
        for i in range(args.iters):
            msg = b"bench %d" % i
            jobs.append((msg, sign(msg, sk, tables, rng)))
    elif args.sig and args.infile:
        sig, _, _ = decode_signature(_read(args.sig))
        jobs = [(_read(args.infile), sig)] * args.iters
    else:
        raise UsageError("bench verify needs --sk, or --sig together with --in")
    src = MemoryRowSource(pk)
    ops = 0
    valid = 0
    t0 = time.perf_counter()
    for msg, sig in jobs:
        rep = verify_report(msg, sig, src)
        ops += rep.row_ops
        valid += rep.valid
    dt = time.perf_counter() - t0
    n = len(jobs)
    print(f"iters={n}")
    print(f"valid={valid}")
    print(f"mean_row_ops={ops / n:.2f}")
    print(f"mean_row_ops_over_k={ops / n / p.k:.4f}")
    print(f"mean_verify_ms={1000 * dt / n:.3f}")
    return EXIT_OK


def build_parser():
    ap = _Parser(prog="wavelet", description="Wavelet signatures over F3")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    k = sub.add_parser("keygen", help="generate a key pair")
    k.add_argument("--params", required=True)
    k.add_argument("--seed", default="random", help="hex seed or 'random'")
    k.add_argument("--out-sk", required=True)
    k.add_argument("--out-pk", required=True)
    k.add_argument("--seed-only", action="store_true", help="store only the seed in the secret key file")
    k.set_defaults(func=cmd_keygen)

    s = sub.add_parser("sign", help="sign a message file")
    s.add_argument("--sk", required=True)
    s.add_argument("--tables", default=None, help=f"rejection table file (default: ${params_mod.TABLE_ENV} or bundled)")
    s.add_argument("--in", dest="infile", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--codec", default="3tmr")
    s.set_defaults(func=cmd_sign)

    v = sub.add_parser("verify", help="verify a signature")
    v.add_argument("--pk", required=True)
    v.add_argument("--in", dest="infile", required=True)
    v.add_argument("--sig", required=True)
    v.add_argument("--stream", action="store_true", help="read key rows from disk on demand")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("recompress", help="change the payload codec of a signature")
    r.add_argument("--in", dest="infile", required=True)
    r.add_argument("--codec", required=True)
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_recompress)

    p = sub.add_parser("params", help="parameter sets")
    psub = p.add_subparsers(dest="action", parser_class=_Parser)
    psub.required = True
    ps = psub.add_parser("show")
    ps.add_argument("id")
    ps.set_defaults(func=cmd_params_show)

    t = sub.add_parser("tables", help="rejection tables")
    tsub = t.add_subparsers(dest="action", parser_class=_Parser)
    tsub.required = True
    tc = tsub.add_parser("check")
    tc.add_argument("--params", required=True)
    tc.add_argument("--tables", default=None)
    tc.set_defaults(func=cmd_tables_check)

    b = sub.add_parser("bench", help="benchmarks")
    bsub = b.add_subparsers(dest="action", parser_class=_Parser)
    bsub.required = True
    bv = bsub.add_parser("verify")
    bv.add_argument("--pk", required=True)
    bv.add_argument("--iters", type=int, default=10)
    bv.add_argument("--sk", default=None, help="sign fresh messages with this key")
    bv.add_argument("--sig", default=None)
    bv.add_argument("--in", dest="infile", default=None)
    bv.add_argument("--tables", default=None)
    bv.set_defaults(func=cmd_bench_verify)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, RowSourceError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
