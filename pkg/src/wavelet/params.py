"""Parameter sets and the rejection-sampling tables used by the decoder."""
import bisect
import gzip
import os
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from pathlib import Path

FRAC_BITS = 128
ONE = 1 << FRAC_BITS
DECIMAL_DIGITS = 40
TABLE_ENV = "WAVELET_TABLES"
DATA_DIR = Path(__file__).with_name("data")


class ConfigError(ValueError):
    pass


class TableDomainError(ValueError):
    pass


@dataclass(frozen=True)
class ParamSet:
    name: str
    param_id: int
    lam: int
    n: int
    w: int
    k: int
    k_U: int
    k_V: int
    d: int
    t_min: int = None
    t_max: int = None
    insecure_toy: bool = False
    q: int = 3

    @property
    def half(self):
        return self.n // 2

    @property
    def r(self):
        """Syndrome length n - k."""
        return self.n - self.k

    @property
    def rows_U(self):
        return self.half - self.k_U

    @property
    def rows_V(self):
        return self.half - self.k_V

    @property
    def kU_free(self):
        return self.k_U - self.d

    @property
    def kV_free(self):
        return self.k_V - self.d

    @property
    def seed_bytes(self):
        return max(1, self.lam // 8)

    def t_range(self):
        lo = 0 if self.t_min is None else self.t_min
        hi = self.half if self.t_max is None else self.t_max
        return lo, hi

    def m1_range(self):
        """Allowed values of the weight-one pair count for a given weight."""
        return [s for s in range(0, self.n - self.w + 1) if (s - self.w) % 2 == 0]

    def k_range(self, t):
        """Valid count of support positions placed at the end of the U information set."""
        return max(0, t + self.kU_free - self.half), min(t, self.kU_free)

    def check(self):
        problems = []
        if self.q != 3:
            problems.append("q must be 3")
        if self.k != self.k_U + self.k_V:
            problems.append("k != k_U + k_V")
        if self.n % 2:
            problems.append("n must be even")
        if not 0 < self.w < self.n:
            problems.append("need 0 < w < n")
        if not 0 <= self.d <= min(self.k_U, self.k_V):
            problems.append("d out of range")
        if self.insecure_toy and 3 * self.w != 6 * self.k_U + 2 * (self.n - 2 * self.k_U):
            problems.append("toy weight relation 3w = 6k_U + 2(n - 2k_U) fails")
        if problems:
            raise ConfigError(f"{self.name}: " + "; ".join(problems))
        return self


SUPERTUBOS = ParamSet("supertubos", 0x01, 128, 8492, 7980, 5605, 3558, 2047, 81,
                      t_min=1953, t_max=2745)
TOY48 = ParamSet("toy48", 0x10, 16, 48, 44, 30, 18, 12, 2, insecure_toy=True)
TOY60 = ParamSet("toy60", 0x11, 16, 60, 54, 35, 21, 14, 2, insecure_toy=True)

REGISTRY = {p.name: p.check() for p in (SUPERTUBOS, TOY48, TOY60)}
BY_ID = {p.param_id: p for p in REGISTRY.values()}
assert len(BY_ID) == len(REGISTRY)


def supertubos():
    return SUPERTUBOS


def toy(name="toy48"):
    p = REGISTRY.get(name)
    if p is None or not p.insecure_toy:
        raise ConfigError(f"unknown toy parameter set {name!r}")
    return p


def get_params(key):
    if isinstance(key, ParamSet):
        return key
    if isinstance(key, int):
        if key not in BY_ID:
            raise ConfigError(f"unknown param_id {key:#04x}")
        return BY_ID[key]
    if key not in REGISTRY:
        raise ConfigError(f"unknown parameter set {key!r}")
    return REGISTRY[key]


# ---------------------------------------------------------------------------
# categorical tables

class Categorical:
    """Distribution over integers given by nonnegative integer weights."""

    def __init__(self, weights):
        items = sorted((int(i), int(v)) for i, v in dict(weights).items() if v > 0)
        if not items:
            raise ConfigError("empty distribution")
        self.values = [i for i, _ in items]
        self.weights = [v for _, v in items]
        self.cum = []
        acc = 0
        for v in self.weights:
            acc += v
            self.cum.append(acc)
        self.total = acc

    def sample(self, rng):
        u = rng.uniform_below(self.total)
        return self.values[bisect.bisect_right(self.cum, u)]

    def as_dict(self):
        return dict(zip(self.values, self.weights))

    def prob(self, i):
        return Fraction(self.as_dict().get(i, 0), self.total)


class RejectionTables:
    """p_V, p_U inputs plus the acceptance tables f_V and f_U.

    Probabilities are fixed point with FRAC_BITS fractional bits.
    Entries missing from f_V / f_U are zero acceptance.
    """

    def __init__(self, params, p_V, p_U, f_V, f_U, always_accept=False):
        self.params = params
        self.p_V = p_V            # Categorical over the weight of x'_V
        self.p_U = p_U            # dict t -> Categorical over k
        self.f_V = f_V            # dict t -> fixed point
        self.f_U = f_U            # dict t -> dict s -> fixed point
        self.always_accept = always_accept

    @classmethod
    def toy(cls, params):
        """INSECURE: no rejection, x'_V uniform and k uniform over its valid range."""
        kv = params.kV_free
        p_V = Categorical({l: comb(kv, l) * 2 ** l for l in range(kv + 1)})
        p_U = {}
        for t in range(params.half + 1):
            lo, hi = params.k_range(t)
            if lo <= hi:
                p_U[t] = Categorical({k: 1 for k in range(lo, hi + 1)})
        return cls(params, p_V, p_U, {}, {}, always_accept=True)

    def sample_v(self, rng):
        return self.p_V.sample(rng)

    def sample_u(self, t, rng):
        cat = self.p_U.get(t)
        if cat is None:
            raise TableDomainError(f"no p_U table for t={t}")
        return cat.sample(rng)

    def accept_v(self, t, rng):
        if self.always_accept:
            return True
        lo, hi = self.params.t_range()
        if not 0 <= t <= self.params.half:
            raise TableDomainError(f"t={t} outside [0, n/2]")
        f = self.f_V.get(t, 0)
        return rng.bits128() < f

    def accept_u(self, m1, t, rng):
        if self.always_accept:
            return True
        row = self.f_U.get(t)
        if row is None:
            raise TableDomainError(f"t={t} outside the U table domain")
        if (m1 - self.params.w) % 2 or not 0 <= m1 <= self.params.n - self.params.w:
            raise TableDomainError(f"m1={m1} outside the U table domain")
        return rng.bits128() < row.get(m1, 0)

    def max_f_V(self):
        return max(self.f_V.values())

    def acceptance_v(self):
        """Probability that one V round is accepted."""
        q = _q1_dist(self.params, self.p_V)
        return sum(q.get(t, 0) * Fraction(f, ONE) for t, f in self.f_V.items())

    def check_domains(self):
        p = self.params
        lo, hi = p.t_range()
        problems = []
        if not self.always_accept:
            for t in range(lo, hi + 1):
                if t not in self.p_U:
                    problems.append(f"p_U missing t={t}")
                if t not in self.f_U:
                    problems.append(f"f_U missing t={t}")
            for t in self.f_V:
                if not lo <= t <= hi:
                    problems.append(f"f_V has t={t} outside [{lo},{hi}]")
            for t, row in self.f_U.items():
                if not lo <= t <= hi:
                    problems.append(f"f_U has t={t} outside [{lo},{hi}]")
                for s, f in row.items():
                    if (s - p.w) % 2 or not 0 <= s <= min(t, p.n - p.w):
                        problems.append(f"f_U({s},{t}) outside the valid domain")
                    if not 0 <= f <= ONE:
                        problems.append(f"f_U({s},{t}) not in [0,1]")
            for t, f in self.f_V.items():
                if not 0 <= f <= ONE:
                    problems.append(f"f_V({t}) not in [0,1]")
            if self.f_V and max(self.f_V.values()) != ONE:
                problems.append("max f_V != 1")
            for t, row in self.f_U.items():
                if row and max(row.values()) != ONE:
                    problems.append(f"max f_U(., {t}) != 1")
            for l in self.p_V.values:
                if not 0 <= l <= p.kV_free:
                    problems.append(f"p_V index {l} outside [0, k_V - d]")
            for t, cat in self.p_U.items():
                klo, khi = p.k_range(t)
                if cat.values[0] < klo or cat.values[-1] > khi:
                    problems.append(f"p_U(., {t}) has k outside [{klo},{khi}]")
        if problems:
            raise ConfigError("; ".join(problems[:10]))
        return True


# ---------------------------------------------------------------------------
# the distributions behind the acceptance functions

def binom_row(N, lo, hi):
    """[C(N, j) for j in lo..hi] by a multiplicative recurrence."""
    lo = max(lo, 0)
    hi = min(hi, N)
    if lo > hi:
        return []
    out = [comb(N, lo)]
    c = out[0]
    for j in range(lo, hi):
        c = c * (N - j) // (j + 1)
        out.append(c)
    return out


def q1_unif_weights(params, i):
    """Integer proportional to the weight distribution of the V part of a
    uniform weight-w error, at |e_V| = i.  The common factor is
    C(n, w) 2^(w/2)."""
    w, h = params.w, params.half
    # p counts pairs of weight one, j = (w + p)/2 - i pairs of weight two among the rest
    p0 = w % 2
    j0 = (w + p0) // 2 - i
    if j0 < 0:
        p0 += 2 * -j0
        j0 = 0
    pmax = min(i, p0 + 2 * (h - i - j0))
    if p0 > pmax:
        return 0
    left = binom_row(i, p0, pmax)
    right = binom_row(h - i, j0, j0 + (pmax - p0) // 2)
    total = 0
    for step, c2 in enumerate(right):
        p = p0 + 2 * step
        total += left[p - p0] * c2 << (3 * p // 2)
    return comb(h, i) * total


def q1_unif(params, i):
    return Fraction(q1_unif_weights(params, i),
                    comb(params.n, params.w) * 2 ** (params.w // 2))


def _q1_dist(params, p_V):
    nv = params.half - params.kV_free
    denom = 3 ** nv * p_V.total
    out = {}
    for i in range(params.half + 1):
        num = q1_weights(params, p_V, i)
        if num:
            out[i] = Fraction(num, denom)
    return out


def q1_weights(params, p_V, i):
    """Integer proportional to q1(i); the common factor is 3^(n/2-k_V+d) * sum(p_V)."""
    nv = params.half - params.kV_free
    row = _v_row(nv)
    total = 0
    for l, pw in zip(p_V.values, p_V.weights):
        m = i - l
        if 0 <= m <= nv:
            total += row[m] * pw
    return total


_V_ROWS = {}


def _v_row(nv):
    if nv not in _V_ROWS:
        _V_ROWS[nv] = [c << m for m, c in enumerate(binom_row(nv, 0, nv))]
    return _V_ROWS[nv]


def q1(params, p_V, i):
    return Fraction(q1_weights(params, p_V, i), 3 ** (params.half - params.kV_free) * p_V.total)


def _u_component(params, t, k):
    """Integer sequence B(s) over s = m1 values for one k, via exact recurrences.

    B(s) = C(t-k, s) C(M, j) 2^(3s/2) with M = n/2 - t - k0, j = (w+s)/2 - t - k0
    and k0 = k_U - d - k.
    """
    n, w, h = params.n, params.w, params.half
    k0 = params.kU_free - k
    a = t - k
    M = h - t - k0
    smax = min(a, n - w)
    out = {}
    s = w % 2
    j = (w + s) // 2 - t - k0
    if j < 0:
        s += 2 * (-j)
        j = 0
    if s > smax or j > M or M < 0:
        return out
    b = comb(a, s) * comb(M, j) * (1 << (3 * s // 2))
    while True:
        if b == 0:
            break
        out[s] = b
        if s + 2 > smax or j + 1 > M:
            break
        b = b * (a - s) * (a - s - 1) * (M - j) * 8 // ((s + 1) * (s + 2) * (j + 1))
        s += 2
        j += 1
    return out


def q2_unif_weights(params, t):
    """dict s -> integer proportional to q2unif(s, t) (same constant for all s)."""
    n, w, h = params.n, params.w, params.half
    s0 = w % 2
    j0 = (w + s0) // 2 - t
    if j0 < 0:
        s0 += 2 * -j0
        j0 = 0
    smax = min(t, n - w, s0 + 2 * (h - t - j0))
    if s0 > smax:
        return {}
    left = binom_row(t, s0, smax)
    right = binom_row(h - t, j0, j0 + (smax - s0) // 2)
    out = {}
    for step, c2 in enumerate(right):
        s = s0 + 2 * step
        v = left[s - s0] * c2 << (3 * s // 2)
        if v:
            out[s] = v
    return out


def q2_unif(params, s, t):
    wts = q2_unif_weights(params, t)
    return Fraction(wts.get(s, 0), sum(wts.values()))


def q2(params, p_U_t, s, t):
    """Exact value of q2(s, t) for a Categorical p_U_t (slow at large sizes)."""
    total = Fraction(0)
    for k, pw in zip(p_U_t.values, p_U_t.weights):
        comp = _u_component(params, t, k)
        if comp:
            total += Fraction(pw * comp.get(s, 0), sum(comp.values()))
    return total / p_U_t.total


def _ratio_to_fixed(num, den, mnum, mden):
    """round((num/den) / (mnum/mden) * 2^128) for nonnegative integers."""
    a = num * mden << (FRAC_BITS + 1)
    b = den * mnum
    return min(ONE, (a // b + 1) >> 1)


def compute_f_V(params, p_V):
    lo, hi = params.t_range()
    ratios = {}
    for i in range(lo, hi + 1):
        num = q1_unif_weights(params, i)
        den = q1_weights(params, p_V, i)
        if num and den:
            ratios[i] = (num, den)
    imax = max(ratios, key=lambda i: Fraction(*ratios[i]))
    mnum, mden = ratios[imax]
    return {i: _ratio_to_fixed(a, b, mnum, mden) for i, (a, b) in ratios.items()}


def compute_f_U_row(params, p_U_t, t, cutoff_bits=FRAC_BITS, precision=384):
    """Acceptance row f_U(., t).

    Values of s whose target probability q2unif(s, t) is below 2^-cutoff_bits
    get no entry (never accepted).  q2 is accumulated in fixed point with
    `precision` bits beyond the largest component normaliser, so each
    retained entry is exact to well below one unit of the 128-bit output.
    """
    target = q2_unif_weights(params, t)
    tz = sum(target.values())
    keep = [s for s, v in target.items() if (v << cutoff_bits) > tz]
    comps = []
    gbits = 0
    for k, pw in zip(p_U_t.values, p_U_t.weights):
        comp = _u_component(params, t, k)
        if comp:
            z = sum(comp.values())
            comps.append((pw, comp, z))
            gbits = max(gbits, z.bit_length())
    g = gbits + precision
    acc = dict.fromkeys(keep, 0)
    for pw, comp, z in comps:
        c = (pw << g) // z
        for s in keep:
            b = comp.get(s)
            if b:
                acc[s] += b * c
    kept = [s for s in keep if acc[s] > 0]
    if not kept:
        return {}
    smax = max(kept, key=lambda s: Fraction(target[s], acc[s]))
    return {s: _ratio_to_fixed(target[s], acc[s], target[smax], acc[smax]) for s in kept}


def compute_rejection_tables(params, p_V, p_U, cutoff_bits=FRAC_BITS, progress=None):
    f_V = compute_f_V(params, p_V)
    f_U = {}
    lo, hi = params.t_range()
    for t in range(lo, hi + 1):
        if t in p_U:
            f_U[t] = compute_f_U_row(params, p_U[t], t, cutoff_bits)
        if progress:
            progress(t)
    return RejectionTables(params, p_V, p_U, f_V, f_U)


# ---------------------------------------------------------------------------
# text format
#
#   # comment
#   [p_V]
#   <l> <value>
#   [p_U <t>]
#   <k> <value>
#   [f_V]
#   <t> <value>
#   [f_U <t>]
#   <s> <value>
#
# values are decimal fixed point in [0, 1]

def fixed_to_decimal(x):
    if x >= ONE:
        return "1." + "0" * DECIMAL_DIGITS
    d = x * 10 ** DECIMAL_DIGITS >> FRAC_BITS
    return "0." + str(d).rjust(DECIMAL_DIGITS, "0")


def decimal_to_fixed(text):
    whole, _, frac = text.strip().partition(".")
    if not whole.isdigit() or (frac and not frac.isdigit()):
        raise ConfigError(f"bad decimal value {text!r}")
    scale = 10 ** len(frac)
    num = int(whole) * scale + (int(frac) if frac else 0)
    if num > scale:
        raise ConfigError(f"value {text} exceeds 1")
    return min(ONE, (2 * num * ONE + scale) // (2 * scale))


def dump_tables(tables, path):
    lines = [f"# rejection tables for {tables.params.name}", "[p_V]"]
    pv = tables.p_V
    lines += [f"{l} {fixed_to_decimal(wt * ONE // pv.total)}" for l, wt in zip(pv.values, pv.weights)]
    for t in sorted(tables.p_U):
        cat = tables.p_U[t]
        lines.append(f"[p_U {t}]")
        lines += [f"{k} {fixed_to_decimal(wt * ONE // cat.total)}" for k, wt in zip(cat.values, cat.weights)]
    lines.append("[f_V]")
    lines += [f"{t} {fixed_to_decimal(f)}" for t, f in sorted(tables.f_V.items())]
    for t in sorted(tables.f_U):
        lines.append(f"[f_U {t}]")
        lines += [f"{s} {fixed_to_decimal(f)}" for s, f in sorted(tables.f_U[t].items())]
    lines.append("[end]")
    text = "\n".join(lines) + "\n"
    opener = gzip.open if str(path).endswith(".gz") else open
    with opener(path, "wt") as fh:
        fh.write(text)


def _read_sections(path):
    opener = gzip.open if str(path).endswith(".gz") else open
    try:
        with opener(path, "rt") as fh:
            text = fh.read()
    except (OSError, EOFError) as exc:
        raise ConfigError(f"cannot read table file {path}: {exc}") from exc
    sections = []
    cur = None
    ended = False
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"line {lineno}: bad section header")
            head = line[1:-1].split()
            if head == ["end"]:
                ended = True
                break
            key = head[0]
            arg = int(head[1]) if len(head) > 1 else None
            cur = (key, arg, {})
            sections.append(cur)
            continue
        if cur is None:
            raise ConfigError(f"line {lineno}: data outside a section")
        parts = line.split()
        if len(parts) != 2:
            raise ConfigError(f"line {lineno}: expected 'index value'")
        try:
            idx = int(parts[0])
        except ValueError:
            raise ConfigError(f"line {lineno}: bad index") from None
        cur[2][idx] = decimal_to_fixed(parts[1])
    if not ended:
        raise ConfigError("table file is truncated (missing [end] marker)")
    return sections


def load_tables(path, params):
    p_V = None
    p_U, f_V, f_U = {}, {}, {}
    for key, arg, data in _read_sections(path):
        if key == "p_V":
            p_V = Categorical(data)
        elif key == "p_U":
            p_U[arg] = Categorical(data)
        elif key == "f_V":
            f_V = data
        elif key == "f_U":
            f_U[arg] = data
        else:
            raise ConfigError(f"unknown section {key}")
    if p_V is None:
        raise ConfigError("missing [p_V] section")
    tables = RejectionTables(params, p_V, p_U, f_V, f_U)
    tables.check_domains()
    return tables


def default_table_path(params):
    env = os.environ.get(TABLE_ENV)
    if env:
        return Path(env)
    return DATA_DIR / f"{params.name}_tables.txt.gz"


def tables_for(params, path=None):
    """Tables for a parameter set; toy sets get the always-accept tables."""
    if params.insecure_toy and path is None:
        return RejectionTables.toy(params)
    return load_tables(path or default_table_path(params), params)
