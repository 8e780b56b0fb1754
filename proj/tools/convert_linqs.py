#!/usr/bin/env python3
"""Convert a <name>.content / <name>.cites pair into edges.txt, features.txt, labels.txt.

content lines: <id> <f_1> ... <f_m> <class>
cites lines:   <id_a> <id_b>
Citations that mention ids missing from the content file are dropped.
"""
import argparse
import pathlib


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("content")
    ap.add_argument("cites")
    ap.add_argument("out_dir")
    args = ap.parse_args()

    ids, rows, classes = {}, [], []
    for line in open(args.content):
        parts = line.split()
        if not parts:
            continue
        ids[parts[0]] = len(rows)
        rows.append(parts[1:-1])
        classes.append(parts[-1])
    class_ids = {c: i for i, c in enumerate(sorted(set(classes)))}

    edges, dropped = set(), 0
    for line in open(args.cites):
        parts = line.split()
        if len(parts) != 2:
            continue
        a, b = parts
        if a not in ids or b not in ids:
            dropped += 1
            continue
        u, v = sorted((ids[a], ids[b]))
        if u != v:
            edges.add((u, v))

    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "edges.txt", "w") as f:
        f.writelines(f"{u} {v}\n" for u, v in sorted(edges))
    with open(out / "features.txt", "w") as f:
        f.write(f"{len(rows)} {len(rows[0])}\n")
        f.writelines(" ".join(r) + "\n" for r in rows)
    with open(out / "labels.txt", "w") as f:
        f.writelines(f"{class_ids[c]}\n" for c in classes)
    print(f"{len(rows)} nodes, {len(edges)} edges, {len(rows[0])} features, "
          f"{len(class_ids)} classes ({dropped} citations dropped)")


if __name__ == "__main__":
    main()
