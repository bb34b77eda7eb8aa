"""Regenerate the bundled toy dataset (src/socrec/toydata/).

20 users, 15 items, 12 trust edges. Users u01-u03 and u04-u06 form two
fully connected trust triangles; each triangle rates its own 4-item block
with identical values (planted homophily: friend similarity 1, any other
pair 0). Users u07-u20 rate 4 items each from the remaining 7-item pool.
"""

from pathlib import Path

import numpy as np

OUT_DIR = Path(__file__).resolve().parents[1] / "src" / "socrec" / "toydata"

GROUPS = {
    ("u01", "u02", "u03"): [("m01", 5), ("m02", 4), ("m03", 3), ("m04", 4)],
    ("u04", "u05", "u06"): [("m05", 2), ("m06", 5), ("m07", 4), ("m08", 3)],
}
LONER_ITEMS = [f"m{j:02d}" for j in range(9, 16)]


def main():
    rng = np.random.default_rng(7)
    rating_lines = []
    for members, block in GROUPS.items():
        for user in members:
            for item, value in block:
                rating_lines.append(f"{user}\t{item}\t{value}")
    for u in range(7, 21):
        user = f"u{u:02d}"
        picks = rng.choice(len(LONER_ITEMS), size=4, replace=False)
        for p in sorted(picks):
            value = int(rng.integers(1, 6))
            rating_lines.append(f"{user}\t{LONER_ITEMS[p]}\t{value}")

    trust_lines = []
    for members in GROUPS:
        for a in members:
            for b in members:
                if a != b:
                    trust_lines.append(f"{a}\t{b}")

    OUT_DIR.mkdir(parents=True, exist_ok=True)
    header = "# toy dataset generated by scripts/gen_toydata.py\n"
    (OUT_DIR / "ratings.tsv").write_text(header + "\n".join(rating_lines) + "\n")
    (OUT_DIR / "trust.tsv").write_text(header + "\n".join(trust_lines) + "\n")
    print(f"wrote {len(rating_lines)} ratings and {len(trust_lines)} trust edges to {OUT_DIR}")


if __name__ == "__main__":
    main()
