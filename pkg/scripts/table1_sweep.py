"""Run the parabolic-profile fixtures and print verdicts against expectations."""
import argparse
import json

from stieltjes import catalog


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--filter", default="table1-*", help="glob on fixture names")
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    rows = []
    for r in catalog.run_catalog(args.filter):
        rows.append({"fixture": r.fixture, "params": r.params, "expected": r.expected.outcome.value,
                     "verdict": r.verdict.outcome.value, "match": r.match, "seconds": round(r.seconds, 3),
                     "reason": r.verdict.reason})
    if args.json:
        print(json.dumps(rows, indent=2))
        return
    for row in rows:
        params = ",".join(f"{k}={v:g}" for k, v in row["params"].items())
        flag = "ok " if row["match"] else "BAD"
        print(f"{flag} {row['fixture']:<14s} {params:<12s} {row['verdict']:<14s} {row['seconds']:6.2f}s  {row['reason']}")
    print(f"{sum(r['match'] for r in rows)}/{len(rows)} match")


if __name__ == "__main__":
    main()
