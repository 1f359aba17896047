"""Write Zachary's karate club as data/karate.{edgelist,labels,gml}.

Edges come from networkx's built-in copy of the network. Labels are the
two factions of Zachary's 1977 study: members 1-8, 11-14, 17, 18, 20 and
22 side with the instructor, everyone else (including member 9, who
leaned towards the officers but later joined the instructor's club) sides
with the officer. Vertex names are Zachary's 1-based member numbers.

    python scripts/make_karate.py [outdir]
"""

import sys
from pathlib import Path

import networkx as nx

INSTRUCTOR_FACTION = {1, 2, 3, 4, 5, 6, 7, 8, 11, 12, 13, 14, 17, 18, 20, 22}


def main(outdir: str = "data") -> None:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    g = nx.karate_club_graph()
    edges = sorted((min(u, v) + 1, max(u, v) + 1) for u, v in g.edges())
    (out / "karate.edgelist").write_text(
        "# Zachary karate club, 1-based member ids\n" + "".join(f"{u} {v}\n" for u, v in edges)
    )
    faction = {m: "instructor" if m in INSTRUCTOR_FACTION else "officer" for m in range(1, 35)}
    (out / "karate.labels").write_text("".join(f"{m}\t{faction[m]}\n" for m in range(1, 35)))
    gml = ["graph [", "  directed 0"]
    for m in range(1, 35):
        gml.append(f'  node [ id {m} label "{m}" value "{faction[m]}" ]')
    for u, v in edges:
        gml.append(f"  edge [ source {u} target {v} ]")
    gml.append("]")
    (out / "karate.gml").write_text("\n".join(gml) + "\n")
    print(f"wrote {len(edges)} edges for 34 members to {out}/")


if __name__ == "__main__":
    main(*sys.argv[1:])
