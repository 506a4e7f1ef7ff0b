"""Named verification suites and their reports."""

from __future__ import annotations

import itertools
import json
import math
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field as dc_field

import numpy as np

from . import borel as B
from . import induction as I
from . import modules as M
from .errors import InconsistentOmegaN, InvalidConfig, MomentConditionViolated, NonPrimitiveExponent, UnknownSuite
from .ffield import GF, Field
from .padic import CharacterData, PadicScalar, omega_char
from .series import (
    CharSeries,
    gamma_subst,
    lifted_sum_one_plus_x,
    moment_binomial_sum,
    phi,
    psi,
    wilson_product,
)

SUITES = (
    "series-identities",
    "ind-structure",
    "rho-lattice",
    "yon-consistency",
    "borel-action",
    "acbormu",
    "heckesurnul",
    "hecke-kernel",
)

CITED = (
    "Omega(W) is an irreducible smooth representation of B",
    "(ind 1)/T is irreducible and, for r >= 1, ind(omega^r x 1)/(T-image meet) -> (ind Sym^r)/T is an isomorphism",
    "restriction to B identifies ind_KZ^G V with ind_{B cap KZ}^B V (Iwasawa decomposition)",
    "D#(W) is the only k[[X]]-lattice on which psi is stable and surjective (checked only among diagonal monomial lattices)",
)


@dataclass
class RunConfig:
    p: int | None = None
    n: int = 2
    r: int | None = None
    s: int | None = None
    lam: int | None = None
    field_m: int | None = None
    prec_x: int = 60
    prec_p: int = 24
    depth: int = 2
    trials: int = 20
    windows: int | None = None
    lifts: int = 3
    translates: int = 5
    seed: int = 0
    case: int | None = None
    jobs: int = 1

    def validate(self):
        if self.p is not None and self.p not in (3, 5, 7, 11, 13):
            raise InvalidConfig("p must be one of 3, 5, 7, 11, 13")
        if self.p is not None and self.r is not None and not 0 <= self.r <= self.p - 1:
            raise InvalidConfig("r <= p - 1 violated")
        for name in ("trials", "windows", "lifts", "translates", "jobs"):
            if getattr(self, name) is not None and getattr(self, name) < 1:
                raise InvalidConfig(f"{name} >= 1 violated")
        for p in self.primes():
            if p**self.prec_p <= self.prec_x:
                raise InvalidConfig("p^M > N violated")
        if self.depth < 0:
            raise InvalidConfig("depth >= 0 violated")
        if self.n < 1:
            raise InvalidConfig("n >= 1 violated")
        if self.case is not None and self.case not in (1, 2, 3):
            raise InvalidConfig("case must be 1, 2 or 3")
        if self.case == 1 and self.r not in (None, 0):
            raise InvalidConfig("case 1 needs r = 0")
        if self.case in (2, 3) and self.r == 0:
            raise InvalidConfig(f"case {self.case} needs r >= 1")
        if self.field_m is not None and not 1 <= self.field_m <= 4:
            raise InvalidConfig("field degree must lie in [1, 4]")
        return self

    def window_count(self, suite: str) -> int:
        """--windows, or the suite default: 20 for the Borel suites, 100 where negative controls need headroom."""
        if self.windows is not None:
            return self.windows
        return 100 if suite in ("heckesurnul", "hecke-kernel") else 20

    def primes(self):
        return (self.p,) if self.p is not None else (3, 5, 7)

    def ranks(self, p):
        if self.r is not None:
            return (self.r,)
        if self.case == 1:
            return (0,)
        if self.case in (2, 3):
            return tuple(range(1, p))
        return tuple(range(p))

    def twists(self):
        return (self.s,) if self.s is not None else (0, 1)

    def coefficient_field(self, p) -> Field:
        return GF(p, self.field_m or default_degree(p))

    def lambdas(self, p):
        F = self.coefficient_field(p)
        if self.lam is not None:
            lam = F.from_index(self.lam)
            if lam.is_zero():
                raise InvalidConfig("lambda must be nonzero")
            return (lam,)
        return (F.one, F.generator)


def default_degree(p: int) -> int:
    """Smallest m <= 4 with p^m >= 60, so a uniform element of F_{p^m} is nonzero with probability > 0.98."""
    m = 1
    while p**m < 60 and m < 4:
        m += 1
    return m


@dataclass
class CheckResult:
    id: str
    passed: bool
    statement: str
    detail: dict = dc_field(default_factory=dict)
    payload: dict | None = None
    status: str = "verified"


@dataclass
class SuiteReport:
    suite: str
    config: dict
    checks: list
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def sorted_checks(self):
        return sorted(self.checks, key=lambda c: c.id)

    def to_json_lines(self) -> str:
        """One record per check plus a header and a summary; timing is left out so reruns are byte-identical."""
        lines = [json.dumps({"record": "config", "suite": self.suite, **self.config}, sort_keys=True)]
        for c in self.sorted_checks():
            lines.append(json.dumps({"record": "check", **asdict(c)}, sort_keys=True, default=_jsonable))
        for stmt in CITED:
            lines.append(json.dumps({"record": "check", "id": "cited/" + stmt[:40], "status": "cited, not verified", "statement": stmt}, sort_keys=True))
        total = len(self.checks)
        failed = sum(not c.passed for c in self.checks)
        lines.append(json.dumps({"record": "summary", "checks": total, "failed": failed, "passed": failed == 0}, sort_keys=True))
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        out = [f"suite {self.suite}"]
        out += [f"  {k} = {v}" for k, v in sorted(self.config.items())]
        for c in self.sorted_checks():
            flag = "PASS" if c.passed else "FAIL"
            extra = " ".join(f"{k}={v}" for k, v in sorted(c.detail.items()))
            out.append(f"{flag} {c.id}: {c.statement}" + (f" [{extra}]" if extra else ""))
            if c.payload:
                out.append(f"     replay: {json.dumps(c.payload, sort_keys=True, default=_jsonable)}")
        for stmt in CITED:
            out.append(f"CITED {stmt} (not verified)")
        failed = sum(not c.passed for c in self.checks)
        out.append(f"{len(self.checks) - failed}/{len(self.checks)} checks passed in {self.seconds:.2f}s")
        return "\n".join(out) + "\n"


def _jsonable(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, np.bool_):
        return bool(x)
    return str(x)


def _rng(cfg: RunConfig, *keys) -> np.random.Generator:
    words = [cfg.seed] + [zlib.crc32(str(k).encode()) for k in keys]
    return np.random.default_rng(np.random.SeedSequence(words))


def _check(cid, ok, statement, payload=None, **detail):
    ok = bool(np.all(ok))
    return CheckResult(cid, ok, statement, detail, None if ok else payload)


def _first_failure(mask) -> int | None:
    mask = np.asarray(mask)
    bad = np.flatnonzero(~mask.reshape(-1))
    return int(bad[0]) if bad.size else None


# -- individual suites -------------------------------------------------------------------


def suite_series(cfg: RunConfig):
    out = []
    for p in cfg.primes():
        tag = f"series/p={p}"
        rng = _rng(cfg, "series", p)
        F = GF(p)
        N = cfg.prec_x
        f = CharSeries.random(F, rng, N, batch=(cfg.trials,))
        ok = psi(phi(f)).agrees(f)
        out.append(_check(f"{tag}/psi-phi", ok, "psi(phi(f)) = f", {"seed": cfg.seed, "index": _first_failure(ok)}, samples=cfg.trials))
        for t in range(p):
            val = psi(CharSeries.monomial(F, t, 1, N))
            out.append(_check(f"{tag}/psi-monomial-{t}", val.agrees(CharSeries.constant(F, (-1) ** t, val.prec)), f"psi(X^{t}) = (-1)^{t}"))
        total = lifted_sum_one_plus_x(F, range(p), prec=N)
        out.append(_check(f"{tag}/sum-one-plus-x", total.agrees(CharSeries.monomial(F, p - 1, 1, N)), "sum_{j<p} (1+X)^j = X^{p-1}"))
        a = CharSeries.random(F, rng, N, batch=(cfg.trials,))
        h = CharSeries.monomial(F, p - 1)
        val = psi(h * psi(h * a)).coefficient(0)
        ok = np.all(val == a.coefficient(0), axis=-1)
        out.append(_check(f"{tag}/psi-xp1-twice", ok, "psi(X^{p-1} psi(X^{p-1} a))(0) = a(0)", {"seed": cfg.seed, "index": _first_failure(ok)}))
        ok = all(moment_binomial_sum(p, k, t) == 0 for k in range(p - 1) for t in range(p - 1 - k))
        out.append(_check(f"{tag}/moment-binomial", ok, "sum_j j^k C(j,t) = 0 mod p for k+t <= p-2"))
        edge = {(k, p - 1 - k): moment_binomial_sum(p, k, p - 1 - k) for k in range(p)}
        want = {kt: -pow(math.factorial(kt[1]), -1, p) % p for kt in edge}
        out.append(_check(f"{tag}/moment-binomial-sharp", edge == want, "sum_j j^k C(j,t) = -1/t! mod p for k+t = p-1", {"sums": sorted(edge.items())}))
        ok = all(wilson_product(p, r) == (-1) ** (r + 1) % p for r in range(p))
        out.append(_check(f"{tag}/wilson", ok, "r! (p-1-r)! = (-1)^{r+1} mod p"))
    return out


def _random_units(p, rng, count):
    return [PadicScalar.from_int(int(rng.integers(1, p)) + p * int(rng.integers(0, p**15)), p) for _ in range(count)]


def _primitive_exponents(p, n):
    return [h for h in range(1, p**n - 1) if M.digit_period(h, p, n) == n]


def suite_ind(cfg: RunConfig):
    out = []
    for p in cfg.primes():
        rng = _rng(cfg, "ind", p, cfg.n)
        hs = _primitive_exponents(p, cfg.n)
        if len(hs) > 4:
            hs = sorted(int(h) for h in rng.choice(hs, 4, replace=False))
        nonprim = [h for h in range(1, p**cfg.n - 1) if h not in _primitive_exponents(p, cfg.n)]
        if nonprim:
            try:
                M.build_ind(p, cfg.n, nonprim[0])
                rejected = False
            except NonPrimitiveExponent:
                rejected = True
            out.append(_check(f"ind/p={p}/n={cfg.n}/rejects-h={nonprim[0]}", rejected, "non-primitive h is rejected"))
        for h in hs:
            tag = f"ind/p={p}/n={cfg.n}/h={h}"
            m = M.build_ind(p, cfg.n, h)
            units = _random_units(p, rng, cfg.trials)
            bad = [a.to_int_mod(4) for a in units if not m.check_commutation(a, cfg.prec_x)]
            out.append(_check(f"{tag}/commutation", not bad, "Mat(g_a) g_a(Mat(phi)) = Mat(phi) phi(Mat(g_a))", {"units_mod_p4": bad}, units=cfg.trials))
            rep = M.verify_ind_structure(p, cfg.n, h, cfg.prec_x, y_prec=max(200, cfg.prec_x), units=units[:3])
            for key, ok in sorted(rep.checks.items()):
                out.append(_check(f"{tag}/{key}", ok, _ind_statement(key)))
    return out


def _ind_statement(key: str) -> str:
    if key == "phi_wedge_fixed":
        return "phi(X^h e_0 ^ ... ^ e_{n-1}) = X^h e_0 ^ ... ^ e_{n-1}"
    if key.startswith("gamma_wedge"):
        return "g_a(f) = omega(a)^h f for the wedge f"
    if key == "v_basis":
        return "the v_j form a basis in every component"
    return "phi(v_j) = v_j over F_{p^2n}((Y))"


def _grid(cfg: RunConfig):
    for p in cfg.primes():
        for r in cfg.ranks(p):
            for s in cfg.twists():
                for lam in cfg.lambdas(p):
                    yield p, r, s, lam


def _tag(name, p, r, s, lam):
    return f"{name}/p={p}/r={r}/s={s}/lam={int(lam)}"


def suite_rho(cfg: RunConfig):
    out = []
    for p, r, s, lam in _grid(cfg):
        tag = _tag("rho", p, r, s, lam)
        rng = _rng(cfg, tag)
        m = M.build_rho(p, r, s, lam)
        units = _random_units(p, rng, cfg.trials)
        bad = [a.to_int_mod(4) for a in units if not m.check_commutation(a, cfg.prec_x)]
        out.append(_check(f"{tag}/commutation", not bad, "Mat(g_a) g_a(Mat(phi)) = Mat(phi) phi(Mat(g_a))", {"units_mod_p4": bad}))
        det = M.determinant(m.phi_matrix)
        want = CharSeries.monomial(m.field, -(r + 1) * (p - 1), lam * lam)
        out.append(_check(f"{tag}/determinant", det.agrees(want), "det Mat(phi) = lambda^2 X^{-(r+1)(p-1)}"))
        if s == 0 and lam == m.field.one:
            out.append(_check(f"{tag}/matches-ind", M.rho_matches_ind(p, r), "rho(r, 1) and ind(omega_2^{r+1}) share Mat(phi) and Gamma exponents"))
        v = M.dsharp_random(m, cfg.prec_x, rng, batch=(cfg.trials,))
        img = M.apply_psi_module(m, v)
        ok = M.dsharp_contains(m, img)
        out.append(_check(f"{tag}/psi-stable", ok, "psi(D#) is contained in D#", {"seed": cfg.seed, "index": _first_failure(ok)}))
        ok = img.agrees(m.apply_psi_generic(v))
        out.append(_check(f"{tag}/psi-closed-form", ok, "psi(a e + b f) = l^-1 psi(b) e - l^-1 psi(X^{(r+1)(p-1)} a) f"))
        w = M.psi_lift_dsharp(m, v, rng)
        ok = M.apply_psi_module(m, w).agrees(v) & M.dsharp_contains(m, w)
        out.append(_check(f"{tag}/psi-surjective", ok, "every v in D# is psi(w) for some w in D#", {"seed": cfg.seed, "index": _first_failure(ok)}))
        bound = 4 * p * (r + 3)
        table = M.psi_monomial_table(m, -2, r + 3 + bound)
        rivals = []
        for a, b in itertools.product(range(-2, r + 3), repeat=2):
            if (a, b) != (0, r) and all(M.lattice_psi_profile(m, a, b, bound, table)):
                rivals.append((a, b))
        stable, surj = M.lattice_psi_profile(m, 0, r, bound, table)
        out.append(_check(f"{tag}/lattice-unique", not rivals and stable and surj, "among X^a k[[X]] e + X^b k[[X]] f with -2 <= a,b <= r+2 only (0, r) is psi-stable and psi-surjective", {"rivals": rivals}))
    return out


def suite_yon(cfg: RunConfig):
    out = []
    for p in cfg.primes():
        n = cfg.n
        tag = f"yon/p={p}/n={n}"
        rng = _rng(cfg, tag)
        F = GF(p, 2 * n)
        e = M.ramification_index(p, n)
        N = cfg.prec_x
        Y = CharSeries.monomial(F, 1, 1, e * N)
        one = PadicScalar.from_int(1, p)
        out.append(_check(f"{tag}/identity", M.yon_action(Y, one, F.one, n).agrees(Y), "(a, c) = (1, 1) fixes Y"))
        units = _random_units(p, rng, min(cfg.trials, 6))
        X = CharSeries.monomial(GF(p), 1, 1, N)
        for idx, (a, b) in enumerate(zip(units, units[1:])):
            c, d = M.omega_n_slot(a, p, n, F), M.omega_n_slot(b, p, n, F)
            ya = M.yon_action(Y, a, c, n)
            lhs = ya**e
            rhs = M.inflate(gamma_subst(X, a, N), e, F)
            out.append(_check(f"{tag}/power-{idx}", lhs.agrees(rhs), "g(Y)^e = g(X)"))
            comp = M.yon_action(ya, b, d, n)
            direct = M.yon_action(Y, a * b, c * d, n)
            out.append(_check(f"{tag}/composition-{idx}", comp.agrees(direct), "acting by (a, c) then (b, d) equals acting by (ab, cd)"))
        a = units[0]
        bad_c = next(x for x in F.subfield_elements(n) if not x.is_zero() and x**e != F(omega_char(a)))
        try:
            M.yon_action(Y, a, bad_c, n)
            raised = False
        except InconsistentOmegaN:
            raised = True
        out.append(_check(f"{tag}/forced-constraint", raised, "c^e != omega(a) is rejected"))
    return out


def _windows(m, prec0, depth, rng, batch):
    return B.random_window(m, prec0, depth, rng, batch=(batch,))


def suite_borel(cfg: RunConfig):
    out = []
    for p, r, s, lam in _grid(cfg):
        tag = _tag("borel", p, r, s, lam)
        rng = _rng(cfg, tag)
        m = M.build_rho(p, r, s, lam)
        depth = max(cfg.depth, 3)
        # top entry known to roughly X^prec_x
        w = _windows(m, max(p, -(-cfg.prec_x // p**depth)), depth, rng, cfg.window_count("borel-action"))
        out.append(_check(f"{tag}/window-compatible", w.compatible(), "psi(y_{i+1}) = y_i"))
        ident = B.borel_act(B.BorelElem.identity(p), w)
        ok = all(np.all(a.agrees(b)) for a, b in zip(ident.entries, w.entries))
        out.append(_check(f"{tag}/identity", ok, "1 * y = y"))
        bad = 0
        for _ in range(cfg.trials):
            g, h = _generator(p, rng), _generator(p, rng)
            lhs = B.borel_act(g, B.borel_act(h, w))
            rhs = B.borel_act(g * h, w)
            top = min(lhs.depth, rhs.depth)
            if not all(np.all(lhs[i].agrees(rhs[i])) for i in range(top + 1)):
                bad += 1
        out.append(_check(f"{tag}/group-law", bad == 0, "g * (h * y) = (gh) * y", failures=bad, pairs=cfg.trials))
        x = PadicScalar.from_int(p, p)
        scal = B.borel_act(B.BorelElem(x, PadicScalar.zero(p), x), w)
        want = (lam * lam).inverse()
        ok = all(np.all(scal[i].agrees(w[i].scale(want))) for i in range(w.depth + 1))
        out.append(_check(f"{tag}/central-p", ok, "p I acts by (omega^r chi^2)^{-1}(p) = lambda^{-2}"))
        u = _random_units(p, rng, 1)[0]
        ch = m.character
        scal = B.borel_act(B.BorelElem(u, PadicScalar.zero(p), u), w)
        want = (ch.omega(u) ** r * ch.chi(u) ** 2).inverse()
        ok = all(np.all(scal[i].agrees(w[i].scale(want))) for i in range(w.depth + 1))
        out.append(_check(f"{tag}/central-unit", ok, "x I acts by omega(x)^{-r} chi(x)^{-2} for units x"))
        sh = B.borel_act(B.BorelElem.from_rationals(1, 0, p, p), w)
        ok = all(np.all(sh[i].agrees(w[i - 1])) for i in range(1, w.depth + 1))
        out.append(_check(f"{tag}/diag-shift", ok, "(diag(1,p) * y)_i = y_{i-1}"))
        n1 = B.borel_act(B.BorelElem.from_rationals(1, 1, 1, p), w)
        ok = True
        for i in range(w.depth + 1):
            twist = B._one_plus_x_to(m.field, PadicScalar.from_int(p**i, p), int(w[i].prec))
            ok = ok & n1[i].agrees(w[i].scale(twist))
        out.append(_check(f"{tag}/unipotent-one", ok, "([[1,1],[0,1]] * y)_i = (1+X)^{p^i} y_i"))
    return out


def _generator(p, rng) -> B.BorelElem:
    """A random element of one of the four generator families."""
    kind = int(rng.integers(0, 4))
    one = PadicScalar.from_int(1, p)
    zero = PadicScalar.zero(p)
    u = PadicScalar.from_int(int(rng.integers(1, p)) + p * int(rng.integers(0, p**12)), p)
    if kind == 0:
        x = u.shift(int(rng.integers(-1, 2)))
        return B.BorelElem(x, zero, x)
    if kind == 1:
        return B.BorelElem(one, zero, one.shift(int(rng.integers(-1, 2))))
    if kind == 2:
        return B.BorelElem(one, zero, u)
    return B.BorelElem(one, u.shift(int(rng.integers(-1, 2))), one)


def suite_acbormu(cfg: RunConfig):
    out = []
    for p, r, s, lam in _grid(cfg):
        tag = _tag("acbormu", p, r, s, lam)
        rng = _rng(cfg, tag)
        m = M.build_rho(p, r, s, lam)
        nw = cfg.window_count("acbormu")
        w = _windows(m, 2 * p, max(cfg.depth, 1), rng, nw)
        bad = []
        for t in range(cfg.trials):
            g = B.random_borel(p, rng, bkz=True)
            ok = B.check_acbormu(g, w)
            if not np.all(ok):
                bad.append({"trial": t, "window": _first_failure(ok)})
        out.append(_check(f"{tag}/acbormu", not bad, "theta(g^{-1} * y) = chi(ad) omega^r(a) theta(y) on B cap KZ", {"seed": cfg.seed, "failures": bad}, elements=cfg.trials, windows=nw))
    return out


def _perturbed(lamvec, F):
    """Break the l = 0 moment condition."""
    lv = list(lamvec)
    lv[0] = lv[0] + F.one
    return lv


def suite_heckesurnul(cfg: RunConfig):
    out = []
    for p, r, s, lam in _grid(cfg):
        tag = _tag("heckesurnul", p, r, s, lam)
        rng = _rng(cfg, tag)
        m = M.build_rho(p, r, s, lam)
        F = m.field
        w = _windows(m, p * p + (r + 1) * (p - 1), max(cfg.depth, 2), rng, cfg.window_count("heckesurnul"))
        cases = []
        if cfg.case in (None, 1) and r == 0:
            cases.append((1, None, None))
        if cfg.case in (None, 2) and r >= 1:
            cases += [(2, k, None) for k in range(r)]
        if cfg.case in (None, 3) and r >= 1:
            cases += [(3, None, [F(x) for x in vec]) for vec in I.moment_vectors(p, r)]
        verdicts = {}
        for li in range(cfg.lifts):
            J = B.random_lifts(p, rng)
            for idx, (case, k, lv) in enumerate(cases):
                direct = B.vanishing_value(case, w, J, k, lv)
                reduced = B.vanishing_value(case, w, J, k, lv, method="reduced")
                zero = np.all(direct == 0, axis=-1)
                verdicts.setdefault(idx, []).append(zero)
                cid = f"{tag}/case{case}-{idx}/lift{li}"
                out.append(_check(cid, zero, f"case {case} combination is killed by pi_W", {"seed": cfg.seed, "lift": li, "window": _first_failure(zero)}, k=k))
                out.append(_check(cid + "/reduced", np.array_equal(direct, reduced), "direct Borel action agrees with the reduced expression"))
        for idx, vs in verdicts.items():
            out.append(_check(f"{tag}/case-{idx}/J-independent", all(np.array_equal(vs[0], v) for v in vs), "verdicts do not depend on the lift J"))
        J = B.random_lifts(p, rng)
        if r >= 1 and cfg.case in (None, 3):
            lv = _perturbed([F(x) for x in I.moment_vectors(p, r)[0]], F)
            try:
                B.vanishing_value(3, w, J, lamvec=lv)
                guarded = False
            except MomentConditionViolated:
                guarded = True
            out.append(_check(f"{tag}/control-guard", guarded, "a lambda vector violating a moment condition is rejected"))
            val = B.vanishing_value(3, w, J, lamvec=lv, strict=False)
            frac = float(np.mean(np.any(val != 0, axis=-1)))
            out.append(_check(f"{tag}/control-perturbed", frac >= 0.95, "perturbed case 3 combination is not killed", nonzero=round(frac, 4)))
        frac = float(np.mean(np.any(B.theta_coords(w) != 0, axis=-1)))
        out.append(_check(f"{tag}/control-theta", frac >= 0.95, "theta itself is nonzero", nonzero=round(frac, 4)))
    return out


def suite_hecke_kernel(cfg: RunConfig):
    out = []
    for p, r, s, lam in _grid(cfg):
        tag = _tag("kernel", p, r, s, lam)
        rng = _rng(cfg, tag)
        ch = CharacterData(p, r, s, lam)
        F = ch.field
        m = M.build_rho(p, r, s, lam)
        lifts = [B.random_lifts(p, rng) for _ in range(cfg.lifts)]
        gens_by_lift = [I.kernel_generators(ch, J) for J in lifts]
        n_gen = len(gens_by_lift[0])
        moves = [[B.random_borel(p, rng, upper=True) for _ in range(cfg.translates)] for _ in range(n_gen)]
        families = []
        for gens in gens_by_lift:
            fam = []
            for gi, gen in enumerate(gens):
                fam.append(gen)
                fam += [I.act_induction(g, gen) for g in moves[gi]]
            families.append(fam)
        xr = I.IndVec.basic(ch, I.sym_monomial(r, 0, F))
        controls = [("basis", xr)]
        if r >= 1:
            lv = _perturbed([F(x) for x in I.moment_vectors(p, r)[0]], F)
            controls.append(("perturbed", I.third_family(ch, lv, lifts[0])))
            try:
                I.kernel_generators(ch, lifts[0], [lv])
                guarded = False
            except MomentConditionViolated:
                guarded = True
            out.append(_check(f"{tag}/control-guard", guarded, "generators with a broken moment condition are rejected"))
        ok = all(np.all(P[1:] == 0) for gens in gens_by_lift for gen in gens for P in gen.terms.values())
        out.append(_check(f"{tag}/on-line", ok, "kernel generators take values in k x^r"))
        if r >= 1:
            for i in range(r):
                ok = I.hecke_T(I.IndVec.basic(ch, I.sym_monomial(r, i, F)), lifts[0]) == gens_by_lift[0][i]
                out.append(_check(f"{tag}/T-matches-{i}", ok, "T[1, x^{r-i} y^i] equals the i-th generator"))
        depth, prec0 = I.window_requirement([v for fam in families for v in fam] + [c for _, c in controls], p, r)
        section_seeds = (0, 1)
        nw = cfg.window_count("hecke-kernel")
        base = M.dsharp_random(m, max(prec0, 2 * p), rng, batch=(nw,))
        verdicts = []
        for sseed in section_seeds:
            w = B.window_lift(m, base, depth, _rng(cfg, tag, "section", sseed))
            pairing = I.Pairing(w)
            per_lift = []
            for li, fam in enumerate(families):
                zero = np.stack([np.all(I.evaluate_pi(v, pairing) == 0, axis=-1) for v in fam])
                per_lift.append(zero)
                out.append(_check(f"{tag}/vanish/section{sseed}/lift{li}", zero, "pi_W kills kernel generators and their B-translates",
                                  {"seed": cfg.seed, "section": sseed, "lift": li, "vector": _first_failure(np.all(zero, axis=1))},
                                  vectors=len(fam), windows=nw))
            verdicts.append(per_lift)
            for name, vec in controls:
                val = I.evaluate_pi(vec, pairing)
                frac = float(np.mean(np.any(val != 0, axis=-1)))
                out.append(_check(f"{tag}/control-{name}/section{sseed}", frac >= 0.95, f"control vector ({name}) is not killed", nonzero=round(frac, 4)))
        flat = [v for per_lift in verdicts for v in per_lift]
        same = all(np.array_equal(flat[0], v) for v in flat)
        out.append(_check(f"{tag}/J-and-seed-independent", same, "verdicts agree across lifts J and section seeds"))
    return out


_RUNNERS = {
    "series-identities": suite_series,
    "ind-structure": suite_ind,
    "rho-lattice": suite_rho,
    "yon-consistency": suite_yon,
    "borel-action": suite_borel,
    "acbormu": suite_acbormu,
    "heckesurnul": suite_heckesurnul,
    "hecke-kernel": suite_hecke_kernel,
}


def _split(cfg: RunConfig):
    """Independent sub-configurations for the work pool (one per prime)."""
    return [RunConfig(**{**asdict(cfg), "p": p}) for p in cfg.primes()]


def run_suite(name: str, cfg: RunConfig | None = None) -> SuiteReport:
    cfg = (cfg or RunConfig()).validate()
    if name != "all" and name not in _RUNNERS:
        raise UnknownSuite(name)
    names = SUITES if name == "all" else (name,)
    t0 = time.perf_counter()
    jobs = [(n, sub) for n in names for sub in _split(cfg)]
    if cfg.jobs > 1:
        with ThreadPoolExecutor(cfg.jobs) as pool:
            results = list(pool.map(lambda job: _RUNNERS[job[0]](job[1]), jobs))
    else:
        results = [_RUNNERS[n](sub) for n, sub in jobs]
    checks = [c for res in results for c in res]
    echo = {k: v for k, v in asdict(cfg).items() if k != "jobs"}
    return SuiteReport(name, echo, checks, time.perf_counter() - t0)
