"""From random walks to vertex embeddings on the karate-club graph.

Shows the two halves of the embedding machinery in isolation:
weighted random-walk sampling (with a peek at the walk corpus) and
skip-gram training with negative sampling, then checks that the learned
space reflects the club's famous two-faction split.
"""

import networkx as nx
import numpy as np

from coarsewalk import Graph, TrainConfig, WalkConfig, generate_corpus, train

nxg = nx.karate_club_graph()
g = Graph.build(nxg.number_of_nodes(), [(u, v, 1.0) for u, v in nxg.edges()])
faction = [0 if nxg.nodes[v]["club"] == "Mr. Hi" else 1 for v in nxg.nodes]
print(f"karate club: {g.num_nodes} members, {g.num_edges} ties\n")

corpus = generate_corpus(g, WalkConfig(walks_per_node=20, walk_length=10, seed=7))
print(f"sampled {len(corpus)} walks; three of them:")
for walk in corpus.walks[:3]:
    print("  " + " -> ".join(str(v) for v in walk))

emb = train(corpus, TrainConfig(dim=32, window=5, negatives=5, seed=7), g.num_nodes)
vectors = emb.vectors / np.linalg.norm(emb.vectors, axis=1, keepdims=True)

print("\nnearest neighbors in embedding space:")
for v in (0, 33):
    sims = vectors @ vectors[v]
    order = np.argsort(-sims)[1:6]
    print(f"  member {v:2} (faction {faction[v]}): "
          + ", ".join(f"{int(u)}(f{faction[u]})" for u in order))

same = [vectors[i] @ vectors[j] for i in range(34) for j in range(i + 1, 34)
        if faction[i] == faction[j]]
cross = [vectors[i] @ vectors[j] for i in range(34) for j in range(i + 1, 34)
         if faction[i] != faction[j]]
print(f"\nmean cosine within a faction: {np.mean(same):.3f}")
print(f"mean cosine across factions:  {np.mean(cross):.3f}")
