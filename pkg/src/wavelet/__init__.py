"""Wavelet: code-based signatures over F3 with truncated verification."""
from .decoder import DecodeFailure, decode
from .keygen import (PublicKey, SecretKey, build_m, classic_wave_pk, deserialize_pk,
                     deserialize_sk, keygen, serialize_pk, serialize_sk)
from .params import SUPERTUBOS, TOY48, TOY60, get_params, load_tables, tables_for
from .sigcodec import decode_signature, encode_signature
from .signer import Signature, sign, signer_rng, wave_sign_full
from .verifier import verify, verify_report, wave_verify

__all__ = [
    "DecodeFailure", "decode", "PublicKey", "SecretKey", "build_m", "classic_wave_pk",
    "deserialize_pk", "deserialize_sk", "keygen", "serialize_pk", "serialize_sk",
    "SUPERTUBOS", "TOY48", "TOY60", "get_params", "load_tables", "tables_for",
    "decode_signature", "encode_signature", "Signature", "sign", "signer_rng",
    "wave_sign_full", "verify", "verify_report", "wave_verify",
]
