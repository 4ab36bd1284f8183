#!/usr/bin/env python3
"""Regenerates the bundled mini-treebank (train.tsv / dev.tsv).

Sentences are sampled from a small probabilistic grammar of everyday scenes
plus a few encyclopedic patterns, tagged with the 12-tag universal set.
Tokens are lowercase and punctuation-free except for the occasional comma,
which matches what the tokenizer hands to the tagger.

    python3 generate.py            # writes train.tsv (400) and dev.tsv (100)
"""

import pathlib
import random

SEED = 20210301
N_TRAIN = 400
N_DEV = 100

# noun: (singular, plural)
NOUNS = [
    ("dog", "dogs"), ("cat", "cats"), ("ball", "balls"), ("man", "men"),
    ("woman", "women"), ("child", "children"), ("boy", "boys"),
    ("girl", "girls"), ("horse", "horses"), ("field", "fields"),
    ("park", "parks"), ("tree", "trees"), ("river", "rivers"),
    ("city", "cities"), ("car", "cars"), ("bike", "bikes"),
    ("street", "streets"), ("table", "tables"), ("kitchen", "kitchens"),
    ("book", "books"), ("guitar", "guitars"), ("song", "songs"),
    ("team", "teams"), ("game", "games"), ("player", "players"),
    ("beach", "beaches"), ("wave", "waves"), ("board", "boards"),
    ("bus", "buses"), ("box", "boxes"), ("glass", "glasses"),
    ("water", "waters"), ("food", "foods"), ("meal", "meals"),
    ("student", "students"), ("teacher", "teachers"), ("class", "classes"),
    ("snow", "snows"), ("mountain", "mountains"), ("hill", "hills"),
    ("fish", "fish"), ("boat", "boats"), ("lake", "lakes"),
    ("frisbee", "frisbees"), ("stick", "sticks"), ("rope", "ropes"),
    ("wall", "walls"), ("picture", "pictures"), ("dish", "dishes"),
    ("family", "families"), ("friend", "friends"), ("crowd", "crowds"),
    ("stage", "stages"), ("scene", "scenes"), ("room", "rooms"),
    ("door", "doors"), ("window", "windows"), ("shirt", "shirts"),
    ("hat", "hats"), ("bird", "birds"), ("sky", "skies"),
    ("town", "towns"), ("village", "villages"), ("church", "churches"),
    ("school", "schools"), ("population", "populations"),
    ("people", "people"), ("army", "armies"), ("war", "wars"),
    ("album", "albums"), ("band", "bands"), ("film", "films"),
    ("river", "rivers"), ("island", "islands"), ("region", "regions"),
    ("farmer", "farmers"), ("cow", "cows"), ("sheep", "sheep"),
    ("grass", "grasses"), ("flower", "flowers"), ("garden", "gardens"),
    ("knife", "knives"), ("leaf", "leaves"), ("baby", "babies"),
    ("hand", "hands"), ("face", "faces"), ("light", "lights"),
    ("plant", "plants"), ("paint", "paints"), ("rock", "rocks"),
    ("wheel", "wheels"), ("ice", "ices"), ("skateboard", "skateboards"),
]

# verb: (base, 3sg, past, gerund)
VERBS = [
    ("run", "runs", "ran", "running"), ("jump", "jumps", "jumped", "jumping"),
    ("throw", "throws", "threw", "throwing"),
    ("catch", "catches", "caught", "catching"),
    ("kick", "kicks", "kicked", "kicking"), ("walk", "walks", "walked", "walking"),
    ("ride", "rides", "rode", "riding"), ("swim", "swims", "swam", "swimming"),
    ("play", "plays", "played", "playing"), ("sit", "sits", "sat", "sitting"),
    ("stand", "stands", "stood", "standing"), ("eat", "eats", "ate", "eating"),
    ("cook", "cooks", "cooked", "cooking"), ("cut", "cuts", "cut", "cutting"),
    ("climb", "climbs", "climbed", "climbing"),
    ("watch", "watches", "watched", "watching"),
    ("hold", "holds", "held", "holding"), ("chase", "chases", "chased", "chasing"),
    ("wash", "washes", "washed", "washing"), ("read", "reads", "read", "reading"),
    ("paint", "paints", "painted", "painting"),
    ("dance", "dances", "danced", "dancing"), ("sing", "sings", "sang", "singing"),
    ("pull", "pulls", "pulled", "pulling"), ("push", "pushes", "pushed", "pushing"),
    ("carry", "carries", "carried", "carrying"),
    ("fly", "flies", "flew", "flying"), ("surf", "surfs", "surfed", "surfing"),
    ("ski", "skis", "skied", "skiing"), ("drive", "drives", "drove", "driving"),
    ("open", "opens", "opened", "opening"), ("build", "builds", "built", "building"),
    ("win", "wins", "won", "winning"), ("lose", "loses", "lost", "losing"),
    ("make", "makes", "made", "making"), ("take", "takes", "took", "taking"),
    ("feed", "feeds", "fed", "feeding"), ("plant", "plants", "planted", "planting"),
    ("fish", "fishes", "fished", "fishing"), ("hit", "hits", "hit", "hitting"),
    ("clean", "cleans", "cleaned", "cleaning"), ("sleep", "sleeps", "slept", "sleeping"),
    ("skate", "skates", "skated", "skating"), ("wave", "waves", "waved", "waving"),
    ("lead", "leads", "led", "leading"), ("found", "founds", "founded", "founding"),
    ("release", "releases", "released", "releasing"),
    ("flow", "flows", "flowed", "flowing"), ("live", "lives", "lived", "living"),
]
TRANSITIVE = {"throw", "catch", "kick", "ride", "play", "eat", "cook", "cut",
              "climb", "watch", "hold", "chase", "wash", "read", "paint",
              "sing", "pull", "push", "carry", "fly", "drive", "open",
              "build", "win", "lose", "make", "take", "feed", "plant", "hit",
              "clean", "lead", "release", "found"}
INTRANSITIVE = {"run", "jump", "walk", "swim", "sit", "stand", "dance",
                "surf", "ski", "sleep", "skate", "fish", "flow", "live",
                "wave", "play", "fly"}
# nouns that also work as activity nouns after "a" / "the"
ACTIVITY_NOUNS = ["run", "walk", "swim", "ride", "dance", "jump", "kick",
                  "throw", "catch", "play", "climb", "cook", "nap", "drink"]

ADJS = ["big", "small", "red", "young", "old", "happy", "tall", "green",
        "little", "large", "blue", "white", "black", "wooden", "busy",
        "cold", "warm", "famous", "local", "new", "long", "quiet"]
ADVS = ["quickly", "slowly", "fast", "together", "often", "away",
        "also", "well", "very", "there", "here", "again", "outside", "later"]
PREPS = ["in", "on", "at", "near", "under", "across", "through", "into",
         "behind", "along", "over", "with", "by", "from"]
DETS = ["the", "a", "the", "the", "a", "this", "that", "every", "each", "some"]
DETS_PL = ["the", "some", "these", "those", "many", "two", "three"]
PRONS = ["he", "she", "they", "we", "i", "you", "it", "someone"]
POSS = ["his", "her", "their", "its", "my", "our"]
NUMS = ["one", "two", "three", "four", "five", "ten", "1990", "1887",
        "2004", "12", "500", "1200"]
CONJS = ["and", "or", "but"]
INTERJ = ["oh", "wow", "hello", "hey", "yes", "no", "um", "ah", "ouch", "okay"]
PLACES = ["park", "field", "street", "kitchen", "beach", "river", "lake",
          "garden", "room", "city", "town", "stage", "scene", "snow",
          "mountain", "school", "yard", "road", "water"]


class Sampler:
    def __init__(self, rng):
        self.r = rng

    def pick(self, xs):
        return self.r.choice(xs)

    def maybe(self, p=0.5):
        return self.r.random() < p

    def np(self, plural=None, allow_pron=True, allow_adj=True):
        """Noun phrase as list of (token, tag)."""
        if plural is None:
            plural = self.maybe(0.3)
        out = []
        if allow_pron and self.maybe(0.12):
            return [(self.pick(PRONS), "PRON")]
        if plural:
            if self.maybe(0.75):
                d = self.pick(DETS_PL)
                out.append((d, "NUM" if d in ("two", "three") else
                            "ADJ" if d == "many" else "DET"))
        else:
            if self.maybe(0.15):
                out.append((self.pick(POSS), "PRON"))
            else:
                out.append((self.pick(DETS), "DET"))
        if allow_adj and self.maybe(0.35):
            if self.maybe(0.15):
                out.append(("very", "ADV"))
            out.append((self.pick(ADJS), "ADJ"))
        noun = self.pick(NOUNS)
        out.append((noun[1] if plural else noun[0], "NOUN"))
        if out[0][0] == "a" and out[1][0][0] in "aeiou":
            out[0] = ("an", "DET")
        return out

    def pp(self):
        prep = self.pick(PREPS)
        out = [(prep, "ADP"), ("the", "DET")]
        if self.maybe(0.2):
            out.append((self.pick(ADJS), "ADJ"))
        out.append((self.pick(PLACES), "NOUN"))
        return out

    def verb(self, form, transitive=None):
        pool = VERBS
        if transitive is True:
            pool = [v for v in VERBS if v[0] in TRANSITIVE]
        elif transitive is False:
            pool = [v for v in VERBS if v[0] in INTRANSITIVE]
        v = self.pick(pool)
        return v[{"base": 0, "3sg": 1, "past": 2, "ing": 3}[form]]

    def clause(self):
        """Subject + predicate with agreement."""
        subj_plural = self.maybe(0.35)
        subj = self.np(plural=subj_plural)
        pron = subj[0][1] == "PRON" and len(subj) == 1
        word = subj[0][0] if pron else None
        third_sg = (not subj_plural) and word not in ("they", "we", "i", "you")
        kind = self.r.random()
        out = list(subj)
        if kind < 0.35:
            form = "3sg" if third_sg else "base"
            if self.maybe(0.5):
                form = "past"
            trans = self.maybe(0.55)
            out.append((self.verb(form, trans), "VERB"))
            if trans:
                out += self.np(allow_pron=True)
        elif kind < 0.55:
            aux = ("is" if third_sg else "are") if self.maybe(0.7) else (
                "was" if third_sg else "were")
            if word == "i":
                aux = "am" if self.maybe(0.5) else "was"
            out.append((aux, "VERB"))
            if self.maybe(0.15):
                out.append(("not", "PRT"))
            trans = self.maybe(0.5)
            out.append((self.verb("ing", trans), "VERB"))
            if trans:
                out += self.np(allow_pron=False)
        elif kind < 0.68:
            form = "3sg" if third_sg else "base"
            if self.maybe(0.4):
                form = "past"
            out.append((self.verb(form, False), "VERB"))
            out.append((self.pick(CONJS[:1]), "CONJ"))
            out.append((self.verb(form, False), "VERB"))
        elif kind < 0.78:
            form = "past"
            out.append((self.pick(["wanted", "tried", "started", "likes",
                                   "loves", "decided"]), "VERB"))
            out.append(("to", "PRT"))
            trans = self.maybe(0.6)
            out.append((self.verb("base", trans), "VERB"))
            if trans:
                out += self.np(allow_pron=False)
        elif kind < 0.88:
            form = "3sg" if third_sg else "past"
            out.append((self.pick(["picks", "picked", "gives", "gave",
                                   "takes", "took", "puts", "put"]), "VERB"))
            if self.maybe(0.5):
                out.append((self.pick(["up", "down", "out", "off"]), "PRT"))
            out += self.np(allow_pron=False)
        else:
            aux = ("has" if third_sg else "have")
            out.append((aux, "VERB"))
            trans = True
            out.append((self.pick(["taken", "made", "built", "thrown",
                                   "caught", "eaten", "played", "painted",
                                   "cleaned", "opened", "won"]), "VERB"))
            out += self.np(allow_pron=False)
        if self.maybe(0.3):
            out.append((self.pick(ADVS), "ADV"))
        if self.maybe(0.6):
            out += self.pp()
        return out

    def activity(self):
        subj = self.np(plural=False, allow_pron=False)
        verb = self.pick(["takes", "took", "goes", "went", "enjoys",
                          "enjoyed", "wants", "needs"])
        out = list(subj) + [(verb, "VERB")]
        if verb in ("goes", "went"):
            out += [("for", "ADP")]
        out += [("a", "DET")]
        if self.maybe(0.3):
            out.append((self.pick(["long", "quick", "short", "nice"]), "ADJ"))
        out.append((self.pick(ACTIVITY_NOUNS), "NOUN"))
        if self.maybe(0.6):
            out += self.pp()
        return out

    def encyclopedic(self):
        k = self.r.random()
        if k < 0.25:
            return ([("the", "DET"), (self.pick(["city", "town", "village",
                                                 "region", "island"]), "NOUN"),
                     ("has", "VERB"), ("a", "DET"), ("population", "NOUN"),
                     ("of", "ADP"), (self.pick(NUMS), "NUM"),
                     ("people", "NOUN")])
        if k < 0.45:
            out = [(self.pick(["he", "she"]), "PRON"), ("was", "VERB"),
                   ("born", "VERB"), ("in", "ADP"), (self.pick(NUMS), "NUM")]
            if self.maybe(0.5):
                out += [("in", "ADP"), ("a", "DET"), ("small", "ADJ"),
                        ("town", "NOUN")]
            return out
        if k < 0.65:
            return ([("the", "DET"), ("band", "NOUN"),
                     (self.pick(["released", "recorded"]), "VERB"),
                     ("their", "PRON"), (self.pick(["first", "second",
                                                    "new"]), "ADJ"),
                     ("album", "NOUN"), ("in", "ADP"),
                     (self.pick(NUMS), "NUM")])
        if k < 0.8:
            return ([("the", "DET"), ("river", "NOUN"), ("flows", "VERB"),
                     ("through", "ADP"), ("the", "DET"),
                     (self.pick(["city", "valley", "region", "town"]), "NOUN"),
                     (",", "PUNCT"), ("and", "CONJ"), ("it", "PRON"),
                     (self.pick(["is", "was"]), "VERB"),
                     (self.pick(["famous", "long", "wide", "cold"]), "ADJ")])
        return ([("the", "DET"), ("team", "NOUN"),
                 (self.pick(["won", "lost", "played"]), "VERB"),
                 ("the", "DET"), (self.pick(["game", "match", "final"]), "NOUN"),
                 ("in", "ADP"), (self.pick(NUMS), "NUM")])

    def interjection(self):
        out = [(self.pick(INTERJ), "X")]
        if self.maybe(0.5):
            out.append((self.pick(INTERJ), "X"))
        if self.maybe(0.3):
            out.append((self.pick(["there", "again"]), "ADV"))
        return out

    def sentence(self):
        k = self.r.random()
        if k < 0.58:
            s = self.clause()
            if self.maybe(0.12):
                s += [(",", "PUNCT"), (self.pick(["and", "but", "while"]),
                                       "CONJ")] + self.clause()
            return s
        if k < 0.72:
            return self.activity()
        if k < 0.90:
            return self.encyclopedic()
        if k < 0.95:
            return self.interjection()
        # plural subject, bare-plural object: "dogs chase cats"
        a = self.pick(NOUNS)[1]
        b = self.pick(NOUNS)[1]
        v = self.pick([v for v in VERBS if v[0] in TRANSITIVE])[0]
        return [(a, "NOUN"), (v, "VERB"), (b, "NOUN")]


def main():
    here = pathlib.Path(__file__).resolve().parent
    s = Sampler(random.Random(SEED))
    seen = set()
    sents = []
    # Fixed sentences that anchor documented behaviour of the tagger.
    anchors = [
        [("the", "DET"), ("dog", "NOUN"), ("runs", "VERB"), ("fast", "ADV")],
        [("dogs", "NOUN"), ("chase", "VERB"), ("dogs", "NOUN")],
        [("a", "DET"), ("dog", "NOUN"), ("runs", "VERB"), ("in", "ADP"),
         ("the", "DET"), ("scene", "NOUN")],
        [("oh", "X"), ("wow", "X")],
        [("hello", "X"), ("there", "ADV")],
    ]
    for a in anchors:
        seen.add(tuple(a))
        sents.append(a)
    while len(sents) < N_TRAIN + N_DEV:
        sent = s.sentence()
        key = tuple(sent)
        if key in seen:
            continue
        seen.add(key)
        sents.append(sent)
    train, dev = sents[:N_TRAIN], sents[N_TRAIN:]
    for name, part in (("train.tsv", train), ("dev.tsv", dev)):
        with open(here / name, "w", encoding="utf-8", newline="\n") as f:
            for sent in part:
                for tok, tag in sent:
                    f.write(f"{tok}\t{tag}\n")
                f.write("\n")


if __name__ == "__main__":
    main()
