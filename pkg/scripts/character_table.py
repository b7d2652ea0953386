"""Print the character table of S_n for given Thoma parameters, formula next to model.

    python scripts/character_table.py --a 1/2 1/4 --b 1/8 --n 5
"""

import argparse

from thoma_lab.cli import cmd_character
from thoma_lab.config import ExperimentConfig
from thoma_lab.thoma import ThomaParams


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--a", nargs="*", default=["1/2", "1/4"])
    parser.add_argument("--b", nargs="*", default=["1/8"])
    parser.add_argument("--n", type=int, default=5)
    args = parser.parse_args()
    config = ExperimentConfig(params=ThomaParams.parse(args.a, args.b), slot_count=max(args.n, 1))
    table = cmd_character(config, args.n)
    print(f"{'partition':<16} {'size':>5} {'formula':>14} {'model':>14}  agree")
    for row in table["rows"]:
        print(f"{row['partition']:<16} {row['class_size']:>5} {row['formula']:>14} {row['model']:>14}  {row['agree']}")
    return 0 if table["status"] == "pass" else 1


if __name__ == "__main__":
    raise SystemExit(main())
