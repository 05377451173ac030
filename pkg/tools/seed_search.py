"""Search the generator's free choices for the Country X fixture.

Given the VAR(2) matrices from tools/var_fit.py, this finds a
(panel_seed, companion-noise rho vector, curve_seed) triple for which the
bundled 25-parameter panel reproduces, through the real analysis code:

  * exactly the seven intended key variables selected at threshold 0.90,
    with cumulative explained variance crossing 0.90 between components
    6 and 7;
  * every directed off-diagonal sign cell of themis.datagen.SIGNS at the
    default |r| >= 0.3 threshold.

The search exploits two exactness properties of the generator: companion
noise is orthogonalized in sample against the key levels and each other, and
the smooth trend curves are orthogonal to the levels and mutually. The full
25x25 sample correlation matrix is therefore a closed-form function of the
key-level sample correlations H, the boost gamma and the rho vector, so PCA
selection can be screened with a small eigendecomposition per candidate
instead of generating panels.

Stages:
  1. batch-screen panel seeds for the 42 sign cells on the raw VAR levels
     (vectorized over thousands of seeds at a margin above 0.3 to absorb the
     small dilution the trend curves add);
  2. for each surviving seed, random-search a rho vector whose predicted
     correlation matrix yields exact key selection and the variance window;
  3. confirm with the real datagen + analysis code and scan curve_seed until
     all sign cells also pass on the final panel.

Usage: python tools/seed_search.py fit_prefix [max_seed]
"""

import pathlib
import sys

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from themis import analysis, datagen  # noqa: E402
from themis.model import ParameterSeries  # noqa: E402

K = len(datagen.KEYS)
GAMMA = 1.5
SIGN_MARGIN = 0.306
LENGTH = datagen.SERIES_LENGTH

ORDER = datagen.PARAM_ORDER
KIDX = {k: i for i, k in enumerate(datagen.KEYS)}
BLOCK_OF = {}
IS_HUB = {}
for _k, _comps in datagen.BLOCKS.items():
    BLOCK_OF[_k] = KIDX[_k]
    IS_HUB[_k] = True
    for _c in _comps:
        BLOCK_OF[_c] = KIDX[_k]
        IS_HUB[_c] = False
BI = np.array([BLOCK_OF[p] for p in ORDER])
ISHUB = np.array([IS_HUB[p] for p in ORDER])
HUBCOL = np.array([ORDER.index(k) for k in datagen.KEYS])

SIGN_NUM = np.zeros((K, K))
for _i in range(K):
    for _j in range(K):
        if _i != _j and datagen.SIGNS[_i][_j] != "none":
            SIGN_NUM[_i, _j] = 1.0 if datagen.SIGNS[_i][_j] == "plus" else -1.0


def batch_levels(a1, a2, q, seeds):
    """Key-level paths for many seeds at once, reproducing datagen's RNG."""
    noises = np.stack([
        np.random.default_rng(np.random.SeedSequence(entropy=int(s), spawn_key=(0,)))
        .standard_normal((datagen.BURN_IN + LENGTH, K))
        for s in seeds])
    b = len(seeds)
    x1 = np.zeros((b, K))
    x2 = np.zeros((b, K))
    out = np.empty((b, LENGTH, K))
    for t in range(datagen.BURN_IN + LENGTH):
        x = x1 @ a1.T + x2 @ a2.T + q * noises[:, t]
        x2, x1 = x1, x
        if t >= datagen.BURN_IN:
            out[:, t - datagen.BURN_IN] = x
    return out


def lag_corrs(levels):
    d = np.diff(levels, axis=1)
    xs = d[:, :-1]
    ys = d[:, 1:]
    xs = (xs - xs.mean(axis=1, keepdims=True)) / xs.std(axis=1, keepdims=True)
    ys = (ys - ys.mean(axis=1, keepdims=True)) / ys.std(axis=1, keepdims=True)
    return np.einsum("bti,btj->bij", xs, ys) / xs.shape[1]


def sign_seeds(a1, a2, q, max_seed, chunk=512):
    """Seeds whose raw key levels satisfy every signed cell with margin."""
    hits = []
    for start in range(0, max_seed, chunk):
        seeds = np.arange(start, min(start + chunk, max_seed))
        corr = lag_corrs(batch_levels(a1, a2, q, seeds))
        ok = np.ones(len(seeds), dtype=bool)
        for i in range(K):
            for j in range(K):
                s = SIGN_NUM[i, j]
                if s != 0.0:
                    ok &= s * corr[:, i, j] >= SIGN_MARGIN
        hits.extend(seeds[ok].tolist())
    return hits


def predicted_corr(heff, rho):
    """Closed-form 25x25 sample correlation for hub correlations heff."""
    r = np.where(ISHUB, 1.0, rho[BI])
    full = np.outer(r, r) * heff[np.ix_(BI, BI)]
    same_block = BI[:, None] == BI[None, :]
    full[same_block] = np.outer(r, r)[same_block]
    np.fill_diagonal(full, 1.0)
    return full


def selection_ok(heff, rho):
    w, v = np.linalg.eigh(predicted_corr(heff, rho))
    w = w[::-1]
    v = v[:, ::-1]
    cum = np.cumsum(w) / w.sum()
    if not (cum[5] < 0.897 and cum[6] >= 0.903):
        return False
    picked = sorted(int(np.argmax(np.abs(v[:, k]))) for k in range(7))
    return picked == sorted(HUBCOL.tolist())


def find_rho(levels, rho_rng, tries=40000):
    hv = np.corrcoef(levels, rowvar=False)
    heff = hv / (1.0 + GAMMA)
    np.fill_diagonal(heff, 1.0)
    for _ in range(tries):
        rho = rho_rng.uniform(0.86, 0.985, K)
        if selection_ok(heff, rho):
            return rho
    return None


def full_check(coef, seed):
    series = datagen.generate_panel(seed, coefficients=coef)
    years = range(datagen.FIRST_YEAR, datagen.FIRST_YEAR + LENGTH)
    panel = analysis.standardize([
        ParameterSeries(pid, tuple(zip(years, map(float, series[pid]))))
        for pid in ORDER])
    pca_result = analysis.pca(panel)
    keys = analysis.select_key_variables(pca_result, panel, 0.90, 7)
    if set(keys.selected) != set(datagen.KEYS):
        return False
    cum = np.cumsum(pca_result.explained_variance_ratio)
    if not (cum[5] < 0.90 <= cum[6]):
        return False
    signs = analysis.estimate_signs(panel, keys, datagen.build_adjacency(), 0.3)
    for i, vi in enumerate(datagen.KEYS):
        for j, vj in enumerate(datagen.KEYS):
            if i != j and signs.entry(vi, vj) != datagen.SIGNS[i][j]:
                return False
    return True


def main():
    prefix = sys.argv[1] if len(sys.argv) > 1 else "/tmp/fit"
    max_seed = int(sys.argv[2]) if len(sys.argv) > 2 else 20000
    a1 = np.load(prefix + "_a1.npy")
    a2 = np.load(prefix + "_a2.npy")
    q = np.load(prefix + "_q.npy")
    candidates = sign_seeds(a1, a2, q, max_seed)
    print(f"{len(candidates)} sign-passing seeds in [0, {max_seed})")
    rho_rng = np.random.default_rng(99)
    for seed in candidates:
        levels = datagen.generate_key_levels(seed, coefficients={
            "var_matrix_1": a1.tolist(), "var_matrix_2": a2.tolist(),
            "noise_std": q.tolist()})
        rho = find_rho(levels, rho_rng)
        if rho is None:
            continue
        delta = np.sqrt(1.0 / rho ** 2 - 1.0)
        coef = {
            "var_matrix_1": a1.tolist(), "var_matrix_2": a2.tolist(),
            "noise_std": q.tolist(), "level_boost": GAMMA,
            "companion_seed": 0,
            "companion_noise": {k: float(delta[i])
                                for i, k in enumerate(datagen.KEYS)},
        }
        for curve_seed in range(200):
            coef["curve_seed"] = curve_seed
            if full_check(coef, seed):
                print(f"panel_seed={seed} curve_seed={curve_seed}")
                print("rho:", [round(float(r), 8) for r in rho])
                return
        print(f"seed {seed}: rho found but no curve_seed passed; continuing")
    print("no full hit; raise max_seed")


if __name__ == "__main__":
    main()
