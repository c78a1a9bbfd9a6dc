"""Monte-Carlo oracle: explicit stabilizer simulation of tree realizations.

Every quantity the recursion predicts is re-derived here from scratch: a
concrete random circuit is drawn, simulated as a phase-free tableau, and the
reference-acting subgroup, entropies, and purities are read off by GF(2)
linear algebra.  Agreement with the recursion at equal finite depth is the
package's main correctness check.

Sampling is keyed by (seed, sample index) through a counter-based generator,
so sample i is the same no matter how many workers run or in what order.
"""

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .algebra import DIMS
from .eavesdrop import EavesdropParams, iterate_eavesdrop
from .recursion import ModelParams, initial_condition, iterate
from .tableau import (apply_cnot, apply_perm, extract_label,
                      new_bell_tableau, subsystem_entropy)

__all__ = [
    "TreeRealization",
    "sample_realization",
    "build_state",
    "leaf_qubits",
    "extract_subgroup",
    "subsystem_entropy",
    "mutual_info",
    "MCEstimate",
    "mc_estimate_pi",
    "compare_with_recursion",
    "mc_mutual_info_curve",
    "nested_info_curves",
    "PurityEstimate",
    "mc_purities",
]


@dataclass(frozen=True)
class TreeRealization:
    """One sampled circuit.

    Gate sites are the wires entering a branching CNOT, in generation-major
    left-to-right order: 2^t - 1 sites for t generations, the trunk first.
    Leaf wires never feed a CNOT and carry no gate.  Membership draws are
    kept as uniforms (leaf_u against f, env_u against the environment f) so
    one realization supports nested access sets at several fractions.
    """

    variant: str            # "plain" or "eavesdrop"
    t: int
    param: float            # p for plain, r for eavesdrop
    seed: int
    index: int
    gate_present: tuple     # per site
    gate_kind: tuple        # per site, 0..5, meaningful where present
    leaf_u: tuple           # per leaf (plain), else ()
    eav_present: tuple      # per site (eavesdrop), else ()
    env_u: tuple            # per site (eavesdrop), else ()

    @property
    def n_leaves(self):
        return 1 << self.t

    @property
    def n_sites(self):
        return (1 << self.t) - 1

    def to_record(self):
        gates = [int(k) if g else None
                 for g, k in zip(self.gate_present, self.gate_kind)]
        rec = {"variant": self.variant, "t": self.t, "param": self.param,
               "seed": self.seed, "index": self.index, "gates": gates}
        if self.variant == "plain":
            rec["leaf_u"] = list(self.leaf_u)
        else:
            rec["eav_present"] = [bool(e) for e in self.eav_present]
            rec["env_u"] = list(self.env_u)
        return rec

    def to_json(self):
        return json.dumps(self.to_record())

    @classmethod
    def from_record(cls, rec):
        gates = rec["gates"]
        present = tuple(g is not None for g in gates)
        kind = tuple(g if g is not None else 0 for g in gates)
        return cls(variant=rec["variant"], t=rec["t"], param=rec["param"],
                   seed=rec["seed"], index=rec["index"],
                   gate_present=present, gate_kind=kind,
                   leaf_u=tuple(rec.get("leaf_u", ())),
                   eav_present=tuple(rec.get("eav_present", ())),
                   env_u=tuple(rec.get("env_u", ())))

    @classmethod
    def from_json(cls, text):
        return cls.from_record(json.loads(text))


def _rng_for(seed, index):
    key = np.array([seed, index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_realization(params, seed, index, t=None):
    """Draw realization `index` of the stream `seed`.

    params is ModelParams (plain variant, t taken from it) or
    EavesdropParams (t must be passed).  The draw order per realization is
    fixed: site uniforms, then gate kinds, then membership uniforms.
    """
    rng = _rng_for(seed, index)
    if isinstance(params, ModelParams):
        t = params.t
        n_sites = (1 << t) - 1
        n_leaves = 1 << t
        gate_u = rng.random(n_sites)
        kinds = rng.integers(0, 6, n_sites)
        leaf_u = rng.random(n_leaves)
        return TreeRealization(
            variant="plain", t=t, param=params.p, seed=seed, index=index,
            gate_present=tuple(bool(b) for b in gate_u < params.p),
            # kinds are drawn for every site to keep the stream aligned, but
            # only kept where the gate fired, so records compare canonically
            gate_kind=tuple(int(k) if u < params.p else 0
                            for k, u in zip(kinds, gate_u)),
            leaf_u=tuple(float(u) for u in leaf_u),
            eav_present=(), env_u=())
    if isinstance(params, EavesdropParams):
        if t is None:
            raise ValueError("eavesdrop sampling needs an explicit t")
        n_sites = (1 << t) - 1
        eav_u = rng.random(n_sites)
        kinds = rng.integers(0, 6, n_sites)
        env_u = rng.random(n_sites)
        return TreeRealization(
            variant="eavesdrop", t=t, param=params.r, seed=seed, index=index,
            gate_present=(True,) * n_sites,
            gate_kind=tuple(int(k) for k in kinds),
            leaf_u=(),
            eav_present=tuple(bool(b) for b in eav_u < params.r),
            env_u=tuple(float(u) for u in env_u))
    raise TypeError(f"unsupported params type: {type(params).__name__}")


def _tree_layout(t):
    """Qubit ids of the leaf wires after t generations, left to right.

    Qubit 0 is the reference, qubit 1 the trunk; fresh tree qubits are
    2, 3, ... in creation order (generation-major, left to right)."""
    wires = [1]
    next_free = 2
    for _ in range(t):
        new = []
        for w in wires:
            new.append(w)
            new.append(next_free)
            next_free += 1
        wires = new
    return wires


def leaf_qubits(t):
    return _tree_layout(t)


def build_state(real, backend=None):
    """Simulate the realization; returns the final tableau.

    Plain variant: n = 2^t + 1 qubits (reference + leaves).  Eavesdrop
    variant: one potential environment qubit per site is pre-allocated at id
    2^t + 1 + site, used only where the site's tap fired; untouched slots
    stay |0> and are never granted to any observer.
    """
    t = real.t
    n_leaves = 1 << t
    if real.variant == "eavesdrop":
        n = 2 * n_leaves
    else:
        n = n_leaves + 1
    tab = new_bell_tableau(n)
    wires = [1]
    next_free = 2
    site = 0
    env_base = n_leaves + 1
    for _ in range(t):
        new = []
        for w in wires:
            if real.variant == "eavesdrop" and real.eav_present[site]:
                apply_cnot(tab, w, env_base + site, backend=backend)
            if real.gate_present[site]:
                apply_perm(tab, w, real.gate_kind[site], backend=backend)
            apply_cnot(tab, w, next_free, backend=backend)
            new.append(w)
            new.append(next_free)
            next_free += 1
            site += 1
        wires = new
    return tab


def access_set(real, f):
    """Qubit ids granted to the observer at access fraction f.

    Plain variant: the leaves whose membership uniform fell below f.
    Eavesdrop variant: the realized taps whose uniform fell below f; a tap
    stores a classical record, so extraction must grant only its Z columns
    (extract_subgroup with z_only=True).
    """
    if real.variant == "plain":
        leaves = _tree_layout(real.t)
        return {leaves[i] for i, u in enumerate(real.leaf_u) if u < f}
    env_base = (1 << real.t) + 1
    return {env_base + s
            for s, (e, u) in enumerate(zip(real.eav_present, real.env_u))
            if e and u < f}


def extract_subgroup(tab, F, z_only=False, backend=None):
    """Label of the reference subgroup accessible from the qubit set F.
    z_only grants only the Z columns of F."""
    allowed_x = () if z_only else F
    return extract_label(tab, allowed_x, F, ref_qubit=0, backend=backend)


def mutual_info(tab, F, backend=None):
    """I(R, F) from entropies; equals the subgroup dimension for these
    states (checked property, not assumed here)."""
    s_r = subsystem_entropy(tab, [0], backend=backend)
    s_f = subsystem_entropy(tab, F, backend=backend)
    s_rf = subsystem_entropy(tab, set(F) | {0}, backend=backend)
    return s_r + s_f - s_rf


@dataclass(frozen=True)
class MCEstimate:
    """Empirical label distribution with per-component binomial errors."""

    samples: int
    counts: tuple
    freqs: tuple
    se: tuple
    env_mean: float | None = None  # mean realized taps (eavesdrop only)


def _pi_chunk(task):
    (variant, param, f, t, z_only, seed, lo, hi) = task
    counts = np.zeros(5, dtype=np.int64)
    env_total = 0
    if variant == "plain":
        params = ModelParams(p=param, f=f, t=t)
    else:
        params = EavesdropParams(r=param, f=f)
        # environment records are classical bits: Z columns only
        z_only = True
    for idx in range(lo, hi):
        real = sample_realization(params, seed, idx, t=t)
        tab = build_state(real)
        F = access_set(real, f)
        label = extract_subgroup(tab, F, z_only=z_only)
        counts[int(label)] += 1
        if variant == "eavesdrop":
            env_total += sum(real.eav_present)
    return counts, env_total


def _run_chunks(fn, tasks, threads):
    if threads <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, tasks))


def _chunk_ranges(samples, threads):
    n_chunks = max(1, min(threads * 4, samples))
    bounds = np.linspace(0, samples, n_chunks + 1).astype(int)
    return [(int(lo), int(hi)) for lo, hi in zip(bounds[:-1], bounds[1:])
            if hi > lo]


def mc_estimate_pi(params, samples, seed, t=None, z_only=False, threads=1):
    """Empirical label distribution over `samples` realizations.

    Counts are exact integers aggregated in index order, so the result is
    identical for any thread count.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if isinstance(params, ModelParams):
        variant, param, f, t = "plain", params.p, params.f, params.t
    elif isinstance(params, EavesdropParams):
        if t is None:
            raise ValueError("eavesdrop estimates need an explicit t")
        # z_only is implied for the eavesdrop variant (classical records)
        variant, param, f = "eavesdrop", params.r, params.f
    else:
        raise TypeError(f"unsupported params type: {type(params).__name__}")
    tasks = [(variant, param, f, t, z_only, seed, lo, hi)
             for lo, hi in _chunk_ranges(samples, threads)]
    results = _run_chunks(_pi_chunk, tasks, threads)
    counts = np.zeros(5, dtype=np.int64)
    env_total = 0
    for c, e in results:
        counts += c
        env_total += e
    freqs = counts / samples
    se = np.sqrt(freqs * (1.0 - freqs) / samples)
    env_mean = env_total / samples if variant == "eavesdrop" else None
    return MCEstimate(samples=samples,
                      counts=tuple(int(c) for c in counts),
                      freqs=tuple(float(x) for x in freqs),
                      se=tuple(float(x) for x in se),
                      env_mean=env_mean)


def reference_distribution(params, t=None, z_only=False):
    """Recursion prediction matched to the oracle's depth."""
    if isinstance(params, ModelParams):
        pi0 = initial_condition(params.f, z_only=z_only)
        return iterate(pi0, params.p, params.t)[-1]
    if isinstance(params, EavesdropParams):
        if t is None:
            raise ValueError("eavesdrop reference needs an explicit t")
        return iterate_eavesdrop(params, t)[-1]
    raise TypeError(f"unsupported params type: {type(params).__name__}")


def compare_with_recursion(est, params, t=None, z_only=False):
    """Componentwise z-scores of the estimate against the recursion, with
    the binomial error computed from the reference probabilities."""
    ref = reference_distribution(params, t=t, z_only=z_only)
    zs = []
    for freq, pref in zip(est.freqs, ref):
        se = math.sqrt(max(pref * (1.0 - pref), 0.0) / est.samples)
        if se == 0.0:
            zs.append(0.0 if abs(freq - pref) == 0.0 else math.inf)
        else:
            zs.append((freq - pref) / se)
    return tuple(zs)


def _info_chunk(task):
    (p, t, f_grid, seed, lo, hi) = task
    params = ModelParams(p=p, f=1.0, t=t)  # membership resolved per f below
    sums = np.zeros(len(f_grid))
    sq_sums = np.zeros(len(f_grid))
    for idx in range(lo, hi):
        real = sample_realization(params, seed, idx)
        tab = build_state(real)
        for j, f in enumerate(f_grid):
            F = access_set(real, f)
            val = DIMS[extract_subgroup(tab, F)]
            sums[j] += val
            sq_sums[j] += val * val
    return sums, sq_sums


def mc_mutual_info_curve(p, t, f_grid, samples, seed, threads=1):
    """Mean I(R, F) versus f; one shared realization stream for the whole
    grid so the curves are nested in f.  Returns rows (f, mean, se)."""
    f_grid = tuple(float(f) for f in f_grid)
    tasks = [(p, t, f_grid, seed, lo, hi)
             for lo, hi in _chunk_ranges(samples, threads)]
    results = _run_chunks(_info_chunk, tasks, threads)
    sums = np.zeros(len(f_grid))
    sq_sums = np.zeros(len(f_grid))
    for s, q in results:
        sums += s
        sq_sums += q
    means = sums / samples
    var = np.maximum(sq_sums / samples - means ** 2, 0.0)
    se = np.sqrt(var / samples)
    return [(f, float(m), float(e))
            for f, m, e in zip(f_grid, means, se)]


def nested_info_curves(p, t, f_grid, realizations, seed):
    """Single-realization I-f sweeps: entry [i, j] is I(R, F) for
    realization i at fraction f_grid[j], with access sets nested in f."""
    f_grid = tuple(float(f) for f in f_grid)
    params = ModelParams(p=p, f=1.0, t=t)
    out = np.zeros((realizations, len(f_grid)), dtype=np.int64)
    for i in range(realizations):
        real = sample_realization(params, seed, i)
        tab = build_state(real)
        for j, f in enumerate(f_grid):
            out[i, j] = DIMS[extract_subgroup(tab, access_set(real, f))]
    return out


@dataclass(frozen=True)
class PurityEstimate:
    samples: int
    purity_f: float
    purity_rf: float
    se_f: float
    se_rf: float
    ratio: float
    ratio_se: float


def _purity_chunk(task):
    (p, f, t, seed, lo, hi) = task
    params = ModelParams(p=p, f=f, t=t)
    vals = np.empty((hi - lo, 2))
    for idx in range(lo, hi):
        real = sample_realization(params, seed, idx)
        tab = build_state(real)
        F = access_set(real, f)
        s_f = subsystem_entropy(tab, F)
        s_rf = subsystem_entropy(tab, set(F) | {0})
        vals[idx - lo, 0] = 2.0 ** (-s_f)
        vals[idx - lo, 1] = 2.0 ** (-s_rf)
    return lo, vals


def mc_purities(params, samples, seed, threads=1):
    """Sample means of Tr rho_F^2 and Tr rho_RF^2 plus their ratio.

    The ratio error uses the delta method with the sample covariance.
    Per-sample values are placed by index before any reduction, so results
    do not depend on the chunking.
    """
    if not isinstance(params, ModelParams):
        raise TypeError("mc_purities expects ModelParams")
    tasks = [(params.p, params.f, params.t, seed, lo, hi)
             for lo, hi in _chunk_ranges(samples, threads)]
    results = _run_chunks(_purity_chunk, tasks, threads)
    vals = np.empty((samples, 2))
    for lo, chunk in results:
        vals[lo:lo + chunk.shape[0]] = chunk
    mean_f, mean_rf = vals.mean(axis=0)
    var_f, var_rf = vals.var(axis=0, ddof=1)
    cov = float(np.cov(vals[:, 0], vals[:, 1], ddof=1)[0, 1])
    se_f = math.sqrt(var_f / samples)
    se_rf = math.sqrt(var_rf / samples)
    ratio = mean_rf / mean_f
    ratio_var = (var_rf / mean_f ** 2
                 + var_f * mean_rf ** 2 / mean_f ** 4
                 - 2.0 * cov * mean_rf / mean_f ** 3) / samples
    ratio_se = math.sqrt(max(ratio_var, 0.0))
    return PurityEstimate(samples=samples,
                          purity_f=float(mean_f), purity_rf=float(mean_rf),
                          se_f=se_f, se_rf=se_rf,
                          ratio=float(ratio), ratio_se=ratio_se)
