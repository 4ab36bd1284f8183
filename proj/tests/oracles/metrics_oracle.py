#!/usr/bin/env python3
"""Reference scorer for the metric fixtures.

Written independently of the C++ code: BLEU comes from NLTK's corpus_bleu
when it is installed (falls back to a direct implementation otherwise);
ROUGE-L, METEOR (exact + stem) and CIDEr are brute-force transcriptions of
their definitions. The stem stage uses a hand-made lemma table covering every
inflected word in the fixture.

    python3 metrics_oracle.py ../fixtures/metrics_hyp.jsonl \
        ../fixtures/metrics_ref.jsonl > ../fixtures/metrics_golden.json
"""

import json
import math
import re
import sys
from collections import Counter
from fractions import Fraction

LEMMA = {
    "are": "be", "is": "be", "birds": "bird", "catches": "catch",
    "caught": "catch", "celebrates": "celebrate", "children": "child",
    "cleaning": "clean", "cleans": "clean", "climbed": "climb",
    "climbing": "climb", "climbs": "climb", "cooked": "cook",
    "cooking": "cook", "cooks": "cook", "covered": "cover",
    "dancers": "dancer", "dishes": "dish", "flies": "fly",
    "friends": "friend", "kicking": "kick", "kicks": "kick",
    "paints": "paint", "players": "player", "plays": "play",
    "pulling": "pull", "pulls": "pull", "reading": "read", "reads": "read",
    "rides": "ride", "riding": "ride", "rowing": "row", "singing": "sing",
    "sings": "sing", "skiers": "skier", "surfs": "surf",
    "swimming": "swim", "swims": "swim", "teams": "team", "threw": "throw",
    "throws": "throw", "using": "use", "washes": "wash",
    "watches": "watch", "wins": "win", "won": "win",
}


def tokenize(s):
    return re.findall(r"[a-z0-9]+(?:'[a-z0-9]+)?", s.lower())


def ngrams(toks, n):
    return Counter(tuple(toks[i:i + n]) for i in range(len(toks) - n + 1))


def bleu4(data):
    try:
        from nltk.translate.bleu_score import corpus_bleu
        return corpus_bleu([refs for _, refs, _, _ in data],
                           [hyp for hyp, _, _, _ in data])
    except ImportError:
        pass
    num = [0] * 4
    den = [0] * 4
    c = r = 0
    for hyp, refs, _, _ in data:
        c += len(hyp)
        r += min((abs(len(x) - len(hyp)), len(x)) for x in refs)[1]
        for n in range(1, 5):
            h = ngrams(hyp, n)
            mx = Counter()
            for ref in refs:
                mx |= ngrams(ref, n)
            num[n - 1] += sum(min(v, mx[g]) for g, v in h.items())
            den[n - 1] += sum(h.values())
    if min(num) == 0:
        return 0.0
    bp = 1.0 if c > r else math.exp(1 - r / c)
    return bp * math.exp(sum(math.log(a / b) for a, b in zip(num, den)) / 4)


def lcs(a, b):
    t = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(len(a)):
        for j in range(len(b)):
            t[i + 1][j + 1] = t[i][j] + 1 if a[i] == b[j] else max(t[i][j + 1], t[i + 1][j])
    return t[-1][-1]


def rouge_l(hyp, refs):
    best = 0.0
    for ref in refs:
        l = lcs(hyp, ref)
        if l == 0:
            continue
        p, r = l / len(hyp), l / len(ref)
        best = max(best, 2 * p * r / (p + r))
    return best


def meteor_one(hyp, ref):
    match = {}  # hyp position -> ref position
    used = set()
    for key in (lambda w: w, lambda w: LEMMA.get(w, w)):
        for i, w in enumerate(hyp):
            if i in match:
                continue
            cands = [j for j, x in enumerate(ref) if j not in used and key(x) == key(w)]
            if not cands:
                continue
            j = cands[0]
            if i - 1 in match and match[i - 1] + 1 in cands:
                j = match[i - 1] + 1
            match[i] = j
            used.add(j)
    m = len(match)
    if m == 0:
        return 0.0
    chunks = 0
    prev = None
    for i in sorted(match):
        if prev is None or i != prev + 1 or match[i] != match[prev] + 1:
            chunks += 1
        prev = i
    p, r = m / len(hyp), m / len(ref)
    f = 10 * p * r / (r + 9 * p)
    return f * (1 - 0.5 * (chunks / m) ** 3)


def meteor(hyp, refs):
    return max(meteor_one(hyp, r) for r in refs)


def cider(data):
    n_docs = len(data)
    df = [Counter() for _ in range(4)]
    for _, refs, _, _ in data:
        for n in range(1, 5):
            seen = set()
            for r in refs:
                seen |= set(ngrams(r, n))
            df[n - 1].update(seen)

    def vec(toks, n):
        return {g: c * (math.log(n_docs) - math.log(max(1, df[n - 1][g])))
                for g, c in ngrams(toks, n).items()}

    def cos(a, b):
        na = math.sqrt(sum(v * v for v in a.values()))
        nb = math.sqrt(sum(v * v for v in b.values()))
        if na == 0 or nb == 0:
            return 0.0
        return sum(v * b.get(g, 0.0) for g, v in a.items()) / (na * nb)

    scores = []
    for hyp, refs, _, _ in data:
        s = 0.0
        for n in range(1, 5):
            h = vec(hyp, n)
            s += sum(cos(h, vec(r, n)) for r in refs) / len(refs)
        scores.append(s * 10 / 4)
    return sum(scores) / len(scores)


def coverage(concepts, text):
    toks = tokenize(text)
    found = set(toks) | {LEMMA.get(t, t) for t in toks}
    return sum(c in found for c in concepts) / len(concepts)


def load(hyp_path, ref_path):
    refs = {}
    for line in open(ref_path):
        j = json.loads(line)
        refs[j["id"]] = [tokenize(r) for r in j["references"]]
    data = []
    for line in open(hyp_path):
        j = json.loads(line)
        data.append((tokenize(j["hypothesis"]), refs[j["id"]], j["concepts"],
                     j["hypothesis"]))
    return data


def report(data):
    n = len(data)
    return {
        "bleu4": bleu4(data),
        "rouge_l": sum(rouge_l(h, r) for h, r, _, _ in data) / n,
        "meteor": sum(meteor(h, r) for h, r, _, _ in data) / n,
        "cider": cider(data),
        "coverage": sum(coverage(c, t) for _, _, c, t in data) / n,
        "n": n,
    }


def micro():
    """The hand-checkable examples, printed for the record."""
    p = [Fraction(4, 7), Fraction(1, 2), Fraction(2, 5), Fraction(1, 4)]
    prod = p[0] * p[1] * p[2] * p[3]
    print("bleu micro", float(prod) ** 0.25, file=sys.stderr)
    print("rouge micro", rouge_l(list("abcd"), [list("acbd")]), file=sys.stderr)
    print("meteor micro", meteor_one(["a", "b", "c"], ["a", "b", "c"]), file=sys.stderr)
    two = [(["a", "b", "c", "d"], [["a", "b", "c", "d"]], [], ""),
           (["e", "f", "g", "h"], [["e", "f", "g", "h"]], [], "")]
    print("cider micro", cider(two), file=sys.stderr)


if __name__ == "__main__":
    micro()
    print(json.dumps(report(load(sys.argv[1], sys.argv[2])), indent=2))
