"""Wall time of a full delineation against n, at fixed spatial density."""
import argparse

from vagueregion.evaluation import SyntheticSpec, disk_polygon, loglog_slope, scaling_benchmark


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="500,1000,2000,3000,4500")
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--fixed-density", action=argparse.BooleanOptionalAction, default=True)
    args = ap.parse_args()

    sizes = [int(s) for s in args.sizes.split(",")]
    template = SyntheticSpec(disk_polygon(52.5, -1.5, 1.0), rng_seed=args.seed)
    rows = scaling_benchmark(template, sizes, args.repeats, fixed_density=args.fixed_density)
    print("n,seconds")
    for n, t in rows:
        print(f"{n},{t:.4f}")
    print(f"# log-log slope {loglog_slope(rows):.2f}")


if __name__ == "__main__":
    main()
