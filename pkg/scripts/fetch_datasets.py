#!/usr/bin/env python3
"""Materialize the benchmark datasets under data/.

- lesmis: built locally from networkx (no network needed).
- cora:   downloaded from the LINQS archive (needs network); converted to
          data/cora.edges ("citing cited" per line) and data/cora.labels
          ("paper_id class_index" with classes indexed alphabetically).

Tests that need a missing dataset skip with a pointer to this script.
"""

import io
import os
import sys
import tarfile
import urllib.request

DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), os.pardir, "data")

CORA_URLS = [
    "https://linqs-data.soe.ucsc.edu/public/lbc/cora.tgz",
    "https://linqs-data.soe.ucsc.edu/public/cora.tgz",
]


def write_lesmis():
    try:
        import networkx as nx
    except ImportError:
        print("lesmis: networkx not installed, skipping", file=sys.stderr)
        return
    g = nx.les_miserables_graph()
    path = os.path.join(DATA_DIR, "lesmis.edges")
    with open(path, "w", encoding="utf-8") as f:
        for a, b in sorted(g.edges()):
            f.write(f"{a.replace(' ', '_')} {b.replace(' ', '_')}\n")
    print(f"lesmis: wrote {g.number_of_nodes()} nodes / {g.number_of_edges()} edges -> {path}")


def write_cora():
    blob = None
    for url in CORA_URLS:
        try:
            print(f"cora: trying {url}")
            blob = urllib.request.urlopen(url, timeout=60).read()
            break
        except OSError as exc:
            print(f"cora: {exc}", file=sys.stderr)
    if blob is None:
        print("cora: download failed; place cora.edges and cora.labels under data/ "
              "manually (cites file: 'cited citing' pairs; content file carries the "
              "class of each paper)", file=sys.stderr)
        return

    cites = content = None
    with tarfile.open(fileobj=io.BytesIO(blob), mode="r:gz") as tar:
        for member in tar.getmembers():
            if member.name.endswith("cora.cites"):
                cites = tar.extractfile(member).read().decode()
            elif member.name.endswith("cora.content"):
                content = tar.extractfile(member).read().decode()
    if cites is None or content is None:
        print("cora: archive missing cora.cites/cora.content", file=sys.stderr)
        return

    edges_path = os.path.join(DATA_DIR, "cora.edges")
    with open(edges_path, "w", encoding="utf-8") as f:
        for line in cites.strip().split("\n"):
            a, b = line.split()
            f.write(f"{a} {b}\n")

    classes = {}
    rows = []
    for line in content.strip().split("\n"):
        parts = line.split()
        rows.append((parts[0], parts[-1]))
        classes.setdefault(parts[-1], None)
    index = {name: i for i, name in enumerate(sorted(classes))}
    labels_path = os.path.join(DATA_DIR, "cora.labels")
    with open(labels_path, "w", encoding="utf-8") as f:
        for paper, cls in rows:
            f.write(f"{paper} {index[cls]}\n")
    print(f"cora: wrote {edges_path} and {labels_path} ({len(rows)} labeled papers, "
          f"{len(index)} classes)")


def main():
    os.makedirs(DATA_DIR, exist_ok=True)
    write_lesmis()
    write_cora()


if __name__ == "__main__":
    main()
