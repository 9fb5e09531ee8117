"""Synthetic well-log fixtures with known informative and noise variables."""

import numpy as np

from .copula import DataMatrix
from .dataio import FaciesDataset


def facies_sequence(n, n_classes, rng, mean_run=20):
    """Integer codes ``1..n_classes`` laid out in contiguous runs, like beds down a well."""
    out = np.empty(n, dtype=np.int64)
    i = 0
    while i < n:
        run = 1 + rng.geometric(1.0 / mean_run)
        out[i:i + run] = rng.integers(1, n_classes + 1)
        i += run
    return out


def informative_noise_fixture(
    seed=0,
    n=1000,
    n_informative=3,
    n_noise=5,
    n_classes=3,
    n_wells=4,
    noise_sd=0.2,
):
    """Facies dataset where some logs track the class and the rest are noise.

    Informative variable ``inf<j>`` is ``g_j(label) + N(0, noise_sd^2)`` with
    ``g_j`` a fixed increasing map (linear, exponential, cubic), so the
    dependence is not always linear in the raw units. Noise variable
    ``noise<j>`` is drawn independently of everything else. Rows are split
    into ``n_wells`` contiguous wells with depth increasing by 0.5 per row.

    Returns
    -------
    FaciesDataset
    """
    rng = np.random.default_rng(seed)
    labels = facies_sequence(n, n_classes, rng)
    shapes = (lambda z: z, np.exp, lambda z: z ** 3)
    cols, names = [], []
    for j in range(n_informative):
        base = labels + rng.normal(0.0, noise_sd, size=n)
        cols.append(shapes[j % len(shapes)](base))
        names.append(f"inf{j}")
    for j in range(n_noise):
        cols.append(rng.normal(0.0, 1.0, size=n) if j % 2 == 0 else rng.uniform(0.0, 1.0, size=n))
        names.append(f"noise{j}")
    wells = np.repeat([f"W{w + 1}" for w in range(n_wells)], -(-n // n_wells))[:n]
    depth = 1000.0 + 0.5 * np.arange(n)
    return FaciesDataset(
        wells=wells,
        depth=depth,
        features=DataMatrix(np.column_stack(cols), names),
        labels=labels,
    )


def main(argv=None):
    import argparse

    from .dataio import write_csv

    p = argparse.ArgumentParser(description="Write the informative-vs-noise fixture as CSV.")
    p.add_argument("output")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--wells", type=int, default=4)
    p.add_argument("--noise-sd", type=float, default=0.2)
    args = p.parse_args(argv)
    data = informative_noise_fixture(args.seed, n=args.n, n_wells=args.wells, noise_sd=args.noise_sd)
    write_csv(data, args.output)


if __name__ == "__main__":
    main()
