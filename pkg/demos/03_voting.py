"""How the vote tree settles disagreements.

    python demos/03_voting.py
"""

from textvote.ensemble import (
    Leaf,
    Prediction,
    Vote,
    build_paper_topology,
    eval_tree,
    flatten,
    format_tree,
    paper_system_ids,
    plurality_vote,
)

P = Prediction

print("majority wins:          ", plurality_vote([P(0, 0.9), P(1, 0.6), P(1, 0.7)]))
print("1-1 tie, surer side wins:", plurality_vote([P(0, 0.9), P(1, 0.6)]))
print("full tie, smaller label:", plurality_vote([P(2, 0.5), P(1, 0.5)]))
votes = [P(0, 0.2), P(0, 0.2), P(1, 0.9)]
print("counts vs soft:          ", plurality_vote(votes), plurality_vote(votes, soft=True))

# nesting matters: three agreeing members of one group count once at the top
tree = Vote((Vote((Leaf("x1"), Leaf("x2"), Leaf("x3"))), Leaf("y"), Leaf("z")))
table = {"x1": P(1, 1.0), "x2": P(1, 1.0), "x3": P(1, 1.0), "y": P(0, 1.0), "z": P(0, 1.0)}
print("\nhierarchical:", eval_tree(tree, table).label, " flat:", eval_tree(flatten(tree), table).label)

ids, bow = paper_system_ids()
print("\nthe 16-system ensemble as the `vote --spec` file format:\n")
print(format_tree(build_paper_topology(ids, bow)))
