"""Verification suites driven by the command line.

Each suite returns a :class:`SpectralReport` whose cases are sorted by id,
so output is independent of execution order. Random sweeps draw from
``numpy.random.default_rng(seed)`` and nothing else; timing never enters a
report.
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .core import (DEFAULT_SCALE, PhysicalScale, WronskianPair,
                   eigenfunction, fd_derivative, solve_chi_numeric, wronskian_closed,
                   wronskian_numeric)
from .green import green_eval, green_theta_expansion, resolvent_apply
from .quadrature import (DEFAULT_LIMIT, DEFAULT_QUAD, LimitSpec, QuadratureSpec, integrate,
                         integrate_semi_infinite)
from .report import Case, SpectralReport
from .rhs import (check_norm_axioms, continuity_bound_check, eigen_residual,
                  energy_delta_check, energy_inner, h0_continuity_check, ket_action, l2_inner,
                  norm_nm, nuclear_spectral_check, phi0_membership)
from .spectral import classify_point, rho_density, spectral_jump, stieltjes_measure
from .testfunctions import TestFunction, h0_apply, random_test_function
from .transform import (DEFAULT_GRID_N, DEFAULT_K_MAX, DEFAULT_K_MIN, EnergyGrid,
                        energy_image, forward_transform, forward_transform_rho,
                        inverse_transform, propagate, sigma_eval, spectral_projection)

SUITES = ("norms", "spectrum", "green", "transform", "rhs")
DEFAULT_SEED = 42

GAUSS = TestFunction([(1.0, 1, 1.0)])  # r exp(-r^2/2)
SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class RunConfig:
    """Everything a run depends on; a run is reproducible from this alone."""

    scale: PhysicalScale = DEFAULT_SCALE
    quad: QuadratureSpec = DEFAULT_QUAD
    limit: LimitSpec = DEFAULT_LIMIT
    grid_k_min: float = DEFAULT_K_MIN
    grid_k_max: float = DEFAULT_K_MAX
    grid_n: int = DEFAULT_GRID_N
    output_format: str = "csv"
    output_path: str | None = None
    seed: int = DEFAULT_SEED
    tol: float | None = None
    parallel: bool = False

    @property
    def grid(self) -> EnergyGrid:
        return EnergyGrid.linear_in_k(self.grid_k_min, self.grid_k_max, self.grid_n, self.scale)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["scale"]["c"] = self.scale.c
        out.pop("parallel")  # execution strategy does not change results
        return out

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


@dataclass
class _Builder:
    """Collects cases, substituting the global tolerance override when set."""

    cfg: RunConfig
    report: SpectralReport = field(init=False)

    def __post_init__(self):
        self.report = SpectralReport("")

    def tol(self, default: float) -> float:
        return default if self.cfg.tol is None else self.cfg.tol

    def compare(self, id, expected, actual, tolerance, ref, inputs=None, relative=False):
        return self.report.add(Case.compare(id, expected, actual, self.tol(tolerance), inputs,
                                            ref, relative))

    def bound(self, id, lhs, rhs, ref, inputs=None, tolerance=0.0):
        return self.report.add(Case.bound(id, lhs, rhs, tolerance, inputs, ref))

    def flag(self, id, ok, ref, inputs=None, detail=None):
        return self.report.add(Case.flag(id, ok, inputs, ref, detail))

    def extend(self, rep: SpectralReport, prefix: str, tolerance: float | None = None):
        for c in rep.cases:
            tol = c.tolerance if self.cfg.tol is None or tolerance is None else self.cfg.tol
            self.report.add(Case(f"{prefix}{c.id}", c.inputs, c.expected, c.actual,
                                 c.abs_error, tol, c.ref))

    def done(self, suite: str) -> SpectralReport:
        rep = self.report.sorted()
        rep.suite = suite
        rep.config_echo = self.cfg.to_dict()
        return rep


def _sample(cfg: RunConfig, count: int, stream: int):
    # one child generator per sweep keeps sweeps independent of each other's length
    rng = np.random.default_rng([cfg.seed, stream])
    return [random_test_function(rng) for _ in range(count)]


def suite_spectrum(cfg: RunConfig) -> SpectralReport:
    b = _Builder(cfg)
    sc, lim, quad = cfg.scale, cfg.limit, cfg.quad
    ref_rho = "spectral density from the jump of theta_11"
    for E in (0.5, 1.0, 2.0, 4.0, 8.0):
        jump = spectral_jump(E, lim, sc)
        b.compare(f"rho({E:g}) vs stieltjes jump", rho_density(E, sc), jump, 1e-8, ref_rho,
                  {"E": E}, relative=True)
    for E in (-0.5, -2.0, -8.0):
        b.compare(f"jump({E:g}) vanishes", 0.0, spectral_jump(E, lim, sc), 1e-10,
                  "no spectrum on the negative axis", {"E": E})
    ref_mass = "Stieltjes inversion of the interval mass"
    sqc = math.sqrt(sc.c)
    for E1, E2 in ((1.0, 4.0), (-1.0, 1.0), (0.0, 1.0), (-2.0, -1.0)):
        exact = 2 * sqc / math.pi * (math.sqrt(max(E2, 0.0)) - math.sqrt(max(E1, 0.0)))
        b.compare(f"mass({E1:g},{E2:g})", exact, stieltjes_measure(E1, E2, lim, quad, sc),
                  1e-6, ref_mass, {"E1": E1, "E2": E2})
    for E, want in ((-1.0, "ResolventSet"), (0.0, "SpectrumBoundary"), (1.0, "ContinuousSpectrum")):
        got = classify_point(E, lim, sc).verdict.value
        b.report.add(Case(f"classify({E:g})", {"E": E}, want, got, float(got != want), 0.0,
                          "spectrum of H0 is [0, inf)"))
    return b.done("spectrum")


def _region_points(rng, region: str, count: int):
    mag = rng.uniform(0.1, 6.0, count)
    if region == "NegRe":
        ang = rng.uniform(0.5 * math.pi + 1e-3, 1.5 * math.pi - 1e-3, count)
    elif region == "UpperHalf":
        ang = rng.uniform(1e-3, math.pi - 1e-3, count)
    else:
        ang = rng.uniform(-math.pi + 1e-3, -1e-3, count)
    return mag * np.exp(1j * ang)


def suite_green(cfg: RunConfig) -> SpectralReport:
    b = _Builder(cfg)
    sc, quad = cfg.scale, cfg.quad
    rng = np.random.default_rng([cfg.seed, 1])
    fixtures = ((-1.0, -0.1590461864017892),
                (2j, 0.013619747426357603 - 0.13764721465552343j)) if sc.c == 1.0 else ()
    for E, want in fixtures:
        b.compare(f"green(1,2;{E})", want, green_eval(1.0, 2.0, E, sc).value, 1e-12,
                  "closed-form Green kernel", {"r": 1.0, "s": 2.0, "E": E})
    # error is measured against the largest term of the expansion (see green_theta_expansion)
    ref = "Green kernel as a theta-weighted bilinear form"
    for region in ("NegRe", "UpperHalf", "LowerHalf"):
        Es = _region_points(rng, region, 200)
        rs = rng.uniform(0.0, 5.0, 200)
        ss = rng.uniform(0.0, 5.0, 200)
        worst = 0.0
        for E, r, s in zip(Es, rs, ss, strict=True):
            g = green_eval(r, s, complex(E), sc).value
            t, size = green_theta_expansion(r, s, complex(E), sc, with_scale=True)
            worst = max(worst, abs(g - t) / max(abs(g), size, 1e-300))
        b.report.add(Case(f"theta reconstruction [{region}]", {"points": 200}, 0.0, worst,
                          worst, b.tol(1e-12), ref))
    for pair, E in ((WronskianPair.CHI_TILDE_F_TILDE, -2.0 + 0.5j),
                    (WronskianPair.CHI_F_PLUS, 1.5 + 1j), (WronskianPair.CHI_F_MINUS, 1.5 - 1j)):
        u_kind, v_kind = pair.kinds
        num = wronskian_numeric(lambda r: eigenfunction(u_kind, r, E, sc),
                                lambda r: eigenfunction(v_kind, r, E, sc), 0.7)
        closed = wronskian_closed(pair, E, sc)
        b.compare(f"wronskian[{pair.value}]", closed, num, 1e-8, "Wronskian of the eigenfunction pair",
                  {"E": E}, relative=True)
    r = np.linspace(0.0, 20.0, 2001)
    for E in (0.25, 1.0, 4.0, 9.0):
        sol = solve_chi_numeric(E, 20.0, sc)
        err = float(np.max(np.abs(sol(r) - np.sin(math.sqrt(sc.c * E) * r))))
        b.report.add(Case(f"ode chi({E:g})", {"E": E}, 0.0, err, err, b.tol(1e-8),
                          "regular solution by numerical integration"))
    r = np.linspace(0.3, 6.0, 20)
    grid = EnergyGrid.linear_in_k(0.25, 4.0, 20, sc)
    for E in (2j, -1 + 1j, 3 + 2j):
        g = resolvent_apply(GAUSS, E, r, quad, sc)
        d2 = fd_derivative(lambda x: resolvent_apply(GAUSS, E, x, quad, sc), r, 2)
        resid = float(np.max(np.abs(E * g + d2 / sc.c - GAUSS(r))))
        b.report.add(Case(f"resolvent residual({E})", {"E": E}, 0.0, resid, resid, b.tol(1e-6),
                          "(E - h0) applied to the resolvent"))
        En = grid.nodes
        val = integrate_semi_infinite(
            lambda x: resolvent_apply(GAUSS, E, x, quad, sc)[:, None]
            * sigma_eval(x[:, None], En[None, :], sc), quad)
        want = energy_image(GAUSS, En, quad, sc) / (E - En)
        rel = float(np.max(np.abs(val - want) / np.abs(want)))
        b.report.add(Case(f"resolvent diagonal({E})", {"E": E, "nodes": 20}, 0.0, rel, rel,
                          b.tol(1e-6), "resolvent acts by 1/(E - E') in the energy representation"))
    return b.done("green")


def suite_transform(cfg: RunConfig) -> SpectralReport:
    b = _Builder(cfg)
    sc, quad = cfg.scale, cfg.quad
    c = sc.c
    for E in (1.0, 4.0):
        k = math.sqrt(c * E)
        want = math.sqrt(k / 2) * math.exp(-k * k / 2) if c == 1.0 else None
        got = forward_transform(GAUSS, EnergyGrid.at([E]), quad, sc).values[0]
        if want is not None:
            b.compare(f"forward({E:g})", want, got, 1e-10, "energy image of r exp(-r^2/2)",
                      {"E": E})
        rho_got = forward_transform_rho(GAUSS, EnergyGrid.at([E]), quad, sc).values[0]
        b.compare(f"forward_rho({E:g})", got / math.sqrt(rho_density(E, sc)), rho_got, 1e-10,
                  "rho-weighted energy image", {"E": E}, relative=True)

    members = _sample(cfg, 10, 2)
    lo = quad.with_tol(abs_tol=1e-30)
    for i, phi in enumerate(members):
        image = forward_transform(phi, EnergyGrid.at([1.0]), quad, sc)
        num = integrate_semi_infinite(
            lambda r: np.abs(inverse_transform(image, r, quad, sc) - phi(r)) ** 2, lo)
        rel = math.sqrt(num / abs(l2_inner(phi, phi, quad)))
        b.report.add(Case(f"round trip[{i}]", {"member": i}, 0.0, rel, rel, b.tol(1e-6),
                          "unitarity of the energy transform"))
        psi = members[(i + 1) % len(members)]
        for n in (0, 1, 2):
            pos = l2_inner(phi, h0_apply(psi, n, sc), quad)
            en = energy_inner(phi, psi, n, quad, sc)
            b.compare(f"parseval[{i}][n={n}]", pos, en, 1e-6, "position and energy inner products",
                      {"member": i, "n": n}, relative=True)
    b.compare("parseval self n=1", 3 * SQRT_PI / 8 if c == 1.0 else
              l2_inner(GAUSS, h0_apply(GAUSS, 1, sc), quad).real,
              energy_inner(GAUSS, GAUSS, 1, quad, sc), 1e-6, "energy expectation of r exp(-r^2/2)",
              {"n": 1})

    # band [1, 4]: (phi, P phi) in position space against int_band |phi_hat|^2 dE
    E1, E2 = 1.0, 4.0
    pos = integrate_semi_infinite(
        lambda r: np.conj(GAUSS(r)) * spectral_projection(GAUSS, E1, E2, r, quad, sc), quad).real
    en = integrate(lambda k: np.abs(energy_image(GAUSS, k * k / c, quad, sc)) ** 2 * 2 * k / c,
                   math.sqrt(c * E1), math.sqrt(c * E2), quad)
    if c == 1.0:
        b.compare("band mass[1,4]", 0.233256, en, 1e-5, "spectral projection onto [1, 4]")
    b.compare("band idempotence[1,4]", en, pos, 2 * quad.rel_tol * max(abs(en), 1.0),
              "projection is idempotent and self-adjoint")

    norm2 = abs(l2_inner(GAUSS, GAUSS, quad))
    energy = abs(l2_inner(GAUSS, h0_apply(GAUSS, 1, sc), quad))
    loose = quad.with_tol(1e-9, 1e-12)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)  # quadrature nodes are not a uniform grid
        for t in (0.5, 1.0, 2.0):
            n_t = integrate_semi_infinite(lambda r: np.abs(propagate(GAUSS, t, r, quad, sc)) ** 2,
                                          quad)
            d_t = integrate_semi_infinite(
                lambda r: np.abs(fd_derivative(lambda y: propagate(GAUSS, t, y, quad, sc), r, 1)) ** 2,
                loose) / c
            b.compare(f"propagate norm(t={t:g})", norm2, n_t, 1e-5, "unitary time evolution",
                      {"t": t}, relative=True)
            b.compare(f"propagate energy(t={t:g})", energy, d_t, 1e-5, "energy conservation",
                      {"t": t}, relative=True)
    return b.done("transform")


def suite_norms(cfg: RunConfig) -> SpectralReport:
    b = _Builder(cfg)
    sc, quad = cfg.scale, cfg.quad
    if sc.c == 1.0:
        b.compare("norm[0,0] gauss", math.pi**0.25 / 2, norm_nm(GAUSS, 0, 0, quad, sc), 1e-10,
                  "weighted test-space norm")
        b.compare("norm[1,0] gauss", math.sqrt(1 + 5 * SQRT_PI / 8), norm_nm(GAUSS, 1, 0, quad, sc),
                  1e-10, "weighted test-space norm")
    b.compare("norm zero", 0.0, norm_nm(TestFunction(), 2, 2, quad, sc), 0.0,
              "weighted test-space norm")
    sample = _sample(cfg, 11, 3)
    for n in range(4):
        for m in range(4):
            rep = check_norm_axioms(sample, n, m, quad, sc, max_pairs=50, scalars=(2.0, 1.5j))
            b.extend(rep, f"axioms[{n},{m}] ", tolerance=1e-10)
    for i, phi in enumerate(sample[:5]):
        for m in range(4):
            for n in range(3):
                b.bound(f"monotone[{i}][{n},{m}]", norm_nm(phi, n, m, quad, sc),
                        norm_nm(phi, n + 1, m, quad, sc), "norms increase with the weight power",
                        {"n": n, "m": m}, tolerance=1e-12)
    b.flag("membership gauss", phi0_membership(GAUSS, scale=sc).verdict, "test-space membership")
    b.flag("membership r^3 exp(-r^2)", phi0_membership(TestFunction([(1.0, 3, 2.0)]), scale=sc).verdict,
           "test-space membership")
    even = TestFunction.unchecked([(1.0, 2, 1.0)])
    b.flag("membership rejects r^2 exp(-r^2/2)", not phi0_membership(even, scale=sc).verdict,
           "test-space membership")
    return b.done("norms")


def suite_rhs(cfg: RunConfig) -> SpectralReport:
    b = _Builder(cfg)
    sc, quad = cfg.scale, cfg.quad
    if sc.c == 1.0:
        for E, want in ((1.0, 0.42888194248035344), (4.0, 0.1353352832366127)):
            b.compare(f"ket({E:g})", want, ket_action(GAUSS, E, quad, sc).value, 1e-10,
                      "ket functional on r exp(-r^2/2)", {"E": E})
    b.compare("ket antilinear", -1j * ket_action(GAUSS, 1.0, quad, sc).value,
              ket_action(1j * GAUSS, 1.0, quad, sc).value, 1e-14, "ket functional is antilinear")
    sample = [GAUSS] + _sample(cfg, 19, 4)
    for i, phi in enumerate(sample):
        n10 = norm_nm(phi, 1, 0, quad, sc)
        for E in (0.5, 1.0, 2.0, 5.0):
            for n in (1, 2):
                res = eigen_residual(phi, E, n, quad, sc)
                b.report.add(Case(f"eigen[{i}][E={E:g}][n={n}]", {"E": E, "n": n}, 0.0, res, res,
                                  b.tol(1e-7 * (1 + E**n) * n10),
                                  "generalized eigenvalue equation"))
            b.extend(continuity_bound_check(phi, E, quad, sc), f"[{i}] ")
        for n in (0, 1):
            for m in (0, 1):
                b.extend(h0_continuity_check(phi, n, m, quad, sc), f"[{i}] ")
        if i < 4:
            b.extend(energy_delta_check(phi, 1.0, quad, sc), f"[{i}] ", tolerance=1e-8)
    b.extend(energy_delta_check(GAUSS, 4.0, quad, sc), "", tolerance=1e-8)
    for n in (0, 1, 2):
        b.extend(nuclear_spectral_check(GAUSS, sample[1], n, quad, sc), "[gauss,1] ", tolerance=1e-6)
    b.extend(nuclear_spectral_check(GAUSS, GAUSS, 1, quad, sc), "[gauss,gauss] ", tolerance=1e-6)
    return b.done("rhs")


_RUNNERS = {
    "norms": suite_norms,
    "spectrum": suite_spectrum,
    "green": suite_green,
    "transform": suite_transform,
    "rhs": suite_rhs,
}


def run_suite(name: str, cfg: RunConfig) -> SpectralReport:
    if name == "all":
        return run_all(cfg)
    try:
        runner = _RUNNERS[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES + ('all',))}") from None
    return runner(cfg)


def run_all(cfg: RunConfig) -> SpectralReport:
    if cfg.parallel:
        with ProcessPoolExecutor() as pool:
            reports = list(pool.map(run_suite, SUITES, [cfg] * len(SUITES)))
    else:
        reports = [run_suite(name, cfg) for name in SUITES]
    merged = SpectralReport("all", config_echo=cfg.to_dict())
    for name, rep in zip(SUITES, reports, strict=True):
        for case in rep.cases:
            merged.add(Case(f"{name}/{case.id}", case.inputs, case.expected, case.actual,
                            case.abs_error, case.tolerance, case.ref))
    return merged.sorted()
