#!/usr/bin/env python3
"""Writes the synthetic test corpus, one document per line.

The language alternates two word classes. After a noun the next word is a
connector drawn from a skewed, noun-specific distribution. After a
connector every noun follows exactly the same number of times and the
document ends slightly more often than any single noun, so that row of a
bigram model is flat across all 64 nouns and the quantization leftover
lands on <EOS>. Pools taken from such a row split the code space at exact
powers of two, which keeps the interval codec from stalling on a fixed
window.
"""
import argparse
import random

NOUNS = """
fox owl river stone lamp bridge garden tower wolf crow meadow lantern harbor kettle
forest candle valley mirror pebble anchor orchard ladder falcon willow island
compass beacon marsh thistle cellar raven barrel quarry hollow meadowlark
ember glacier canyon saddle parrot otter walnut chimney fountain arrow blanket
badger cobble dune fern grove heron ivy juniper kiln loom mill nettle oak
pasture quill reed sparrow tulip
""".split()

CONNECTORS = "and with near saw likes follows under beside meets chases behind finds".split()


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=24, help="times each connector precedes each noun")
    ap.add_argument("--skew", type=float, default=2.5, help="Zipf exponent of the connector rows")
    ap.add_argument("--floor", type=float, default=0.05, help="weight added to every connector")
    ap.add_argument("--seed", type=int, default=20240417)
    ap.add_argument("--out", default="tests/data/corpus.txt")
    args = ap.parse_args()
    assert len(NOUNS) == 64 and len(set(NOUNS)) == 64
    rng = random.Random(args.seed)

    # Successor queues fix every connector row exactly.
    queues = {}
    for c in CONNECTORS:
        q = [n for n in NOUNS for _ in range(args.repeats)] + [None] * (2 * args.repeats)
        rng.shuffle(q)
        queues[c] = q

    # Each noun prefers its own ranking of connectors.
    prefs = {}
    for n in NOUNS:
        order = CONNECTORS[:]
        rng.shuffle(order)
        weights = [1.0 / (i + 1) ** args.skew + args.floor for i in range(len(order))]
        prefs[n] = (order, weights)

    lines = []
    while any(queues.values()):
        noun = rng.choice(NOUNS)
        words = [noun]
        while True:
            order, weights = prefs[noun]
            live = [(c, w) for c, w in zip(order, weights) if queues[c]]
            if not live:
                break
            conn = rng.choices([c for c, _ in live], weights=[w for _, w in live])[0]
            words.append(conn)
            nxt = queues[conn].pop()
            if nxt is None:
                break
            words.append(nxt)
            noun = nxt
        lines.append(" ".join(words))

    with open(args.out, "w") as f:
        f.write("\n".join(lines) + "\n")
    tokens = sum(len(l.split()) for l in lines)
    print(f"{len(lines)} lines, {tokens} tokens, {len(NOUNS) + len(CONNECTORS)} words")


if __name__ == "__main__":
    main()
