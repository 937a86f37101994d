"""Regenerates the synthetic lexicon and corpus fixtures under fixtures/.

Deterministic: rerunning produces byte-identical files.
"""
import os
import random

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures")

WORDNET = {
    "n": {"book": 11, "dog": 7, "ball": 12, "cat": 8, "car": 5, "milk": 4, "cookie": 4,
          "water": 8, "house": 12, "baby": 5, "truck": 3, "shoe": 2},
    "v": {"go": 5, "play": 8, "eat": 6, "see": 9, "want": 5, "get": 12, "make": 14,
          "put": 7, "have": 10, "do": 9},
    "a": {"big": 13, "red": 4, "good": 21, "hot": 21, "little": 8},
    "r": {"now": 8, "up": 7, "here": 5},
}

SEMCOR = {
    "n": {"book": 5, "dog": 2, "ball": 3, "cat": 1, "car": 2, "milk": 1, "water": 4,
          "house": 5, "baby": 2},
    "v": {"go": 4, "play": 5, "eat": 3, "see": 6, "want": 3, "get": 8, "make": 9,
          "put": 5, "have": 6, "do": 5},
    "a": {"big": 4, "red": 2, "good": 9, "hot": 5, "little": 4},
    "r": {"now": 4, "up": 3, "here": 2},
}

INDEX_NAMES = {"n": "index.noun", "v": "index.verb", "a": "index.adj", "r": "index.adv"}
POINTERS = {"n": ["@", "~", "#p", "%p", "+"], "v": ["@", "~", "*", ">", "$", "+"],
            "a": ["!", "&", "\\", "="], "r": ["!", "\\"]}

LICENSE = [
    "  1 Synthetic index fixture in the WordNet 3.0 index file layout.",
    "  2 Sense counts are invented and only meaningful for tests.",
]


def write(path, text):
    full = os.path.join(ROOT, path)
    os.makedirs(os.path.dirname(full), exist_ok=True)
    with open(full, "w", newline="\n", encoding="utf-8") as f:
        f.write(text)


def gen_wordnet(rng):
    for pos, entries in WORDNET.items():
        lines = list(LICENSE)
        for lemma in sorted(entries):
            cnt = entries[lemma]
            ptrs = rng.sample(POINTERS[pos], rng.randint(0, len(POINTERS[pos])))
            offsets = sorted(rng.sample(range(1000000, 15000000), cnt))
            tagged = rng.randint(0, cnt)
            fields = [lemma, pos, str(cnt), str(len(ptrs))] + ptrs + [str(cnt), str(tagged)]
            fields += ["%08d" % o for o in offsets]
            lines.append(" ".join(fields) + " ")
        write("wordnet/" + INDEX_NAMES[pos], "\n".join(lines) + "\n")


SEMCOR_POS = {"n": ["NN", "NNS"], "v": ["VB", "VBD", "VBZ", "VBG"], "a": ["JJ", "JJR"], "r": ["RB"]}


def gen_semcor(rng):
    # every (lemma, sense) is attested at least once somewhere, some several times
    events = []
    for pos, entries in SEMCOR.items():
        for lemma, cnt in entries.items():
            for sense in range(1, cnt + 1):
                for _ in range(rng.randint(1, 3)):
                    events.append((pos, lemma, sense))
    rng.shuffle(events)
    files = [[], [], []]
    for i, ev in enumerate(events):
        files[i % 3].append(ev)
    for k, evs in enumerate(files):
        out = ['<contextfile concordance=brown>', '<context filename=br-fx%d paras=yes>' % (k + 1),
               '<p pnum=1>', '<s snum=1>']
        for j, (pos, lemma, sense) in enumerate(evs):
            if j % 7 == 0:
                out.append('<wf cmd=ignore pos=DT>the</wf>')
            if j % 11 == 0:
                out.append('<punc>.</punc>')
                out.append('</s>')
                out.append('<s snum=%d>' % (j + 2))
            tag = rng.choice(SEMCOR_POS[pos])
            lexsn = "%d:%02d:%02d::" % ({"n": 1, "v": 2, "a": 3, "r": 4}[pos], rng.randint(0, 40), sense)
            out.append('<wf cmd=done pos=%s lemma=%s wnsn=%d lexsn=%s>%s</wf>' % (tag, lemma, sense, lexsn, lemma))
        # material the ingester must skip or tally
        out.append('<wf cmd=done pos=IN lemma=of wnsn=1 lexsn=4:00:00::>of</wf>')
        out.append('<wf cmd=done pos=NN lemma=ghost ot=notag>ghost</wf>')
        out.append('<wf cmd=tag pos=NN lemma=spoon wnsn=1 lexsn=1:06:00::>spoon</wf>')
        out.append('</s>')
        out.append('</p>')
        out.append('</context>')
        out.append('</contextfile>')
        write("semcor/br-fx%d" % (k + 1), "\n".join(out) + "\n")


NAMES = ["adam", "ann", "ben", "cara", "dan", "eve", "naima", "sarah", "peter", "ross"]


def gen_names():
    write("names.txt", "# starter proper-noun list, one lowercase name per line\n" + "\n".join(NAMES) + "\n")


# --- mini corpus -----------------------------------------------------------

NOUNS = {"book": "books", "dog": "dogs", "ball": "balls", "cat": "cats", "car": "cars",
         "milk": None, "cookie": "cookies", "water": None, "house": "houses", "baby": "babies",
         "truck": "trucks", "shoe": "shoes", "doggie": "doggies", "spoon": "spoons"}
VERBS = {
    "go": ("goes", "went", "going"), "play": ("plays", "played", "playing"),
    "eat": ("eats", "ate", "eating"), "see": ("sees", "saw", "seeing"),
    "want": ("wants", "wanted", "wanting"), "get": ("gets", "got", "getting"),
    "make": ("makes", "made", "making"), "put": ("puts", "put", "putting"),
    "have": ("has", "had", "having"), "do": ("does", "did", "doing"),
    "jump": ("jumps", "jumped", "jumping"),
}
ADJS = ["big", "red", "good", "hot", "little", "yucky"]
ADVS = ["now", "up", "here"]
FUNCTION = [("the", "det:art|the"), ("a", "det:art|a"), ("you", "pro:per|you"),
            ("it", "pro:per|it"), ("that", "pro:dem|that"), ("in", "prep|in"),
            ("on", "prep|on"), ("and", "coord|and"), ("oh", "co|oh"), ("yes", "co|yes")]


def noun(rng):
    lemma = rng.choice(list(NOUNS))
    plural = NOUNS[lemma]
    if plural and rng.random() < 0.3:
        return plural, "n|%s-PL" % lemma
    return lemma, "n|%s" % lemma


def verb(rng):
    lemma = rng.choice(list(VERBS))
    third, past, ger = VERBS[lemma]
    r = rng.random()
    if r < 0.15:
        return third, "v|%s&3S" % lemma
    if r < 0.3:
        return past, "v|%s&PAST" % lemma
    if r < 0.4:
        return ger, "part|%s-PRESP" % lemma
    return lemma, "v|%s" % lemma


def adj(rng):
    w = rng.choice(ADJS)
    return w, "adj|%s" % w


def adv(rng):
    w = rng.choice(ADVS)
    return w, "adv|%s" % w


def function(rng):
    return rng.choice(FUNCTION)


def utterance(rng, weights, length, extras):
    words = []
    kinds = list(weights)
    probs = [weights[k] for k in kinds]
    for _ in range(length):
        k = rng.choices(kinds, probs)[0]
        words.append({"n": noun, "v": verb, "a": adj, "r": adv, "f": function}[k](rng))
    main = [w for w, _ in words]
    mor = [m for _, m in words]
    for kind in extras:
        pos = rng.randint(0, len(main))
        if kind == "xxx":
            main.insert(pos, "xxx")
        elif kind == "retrace":
            w, m = words[0]
            main = [w, "[/]"] + main
        elif kind == "filler":
            main.insert(pos, "&-uh")
        elif kind == "name":
            name = rng.choice(["Ann", "Ben", "Cara", "Dan"])
            main.insert(pos, name)
            before = sum(1 for t in main[:pos] if t not in ("xxx", "&-uh", "[/]"))
            # the retraced copy of the first word has no %mor item
            if "[/]" in main[:pos]:
                before -= 1
            mor.insert(before, "n:prop|%s" % name)
        elif kind == "cafe":
            main.insert(pos, "café")
            before = sum(1 for t in main[:pos] if t not in ("xxx", "&-uh", "[/]"))
            if "[/]" in main[:pos]:
                before -= 1
            mor.insert(before, "n|café")
    term = rng.choice([".", ".", "?", "!"])
    return " ".join(main) + " " + term, " ".join(mor) + " " + term


def child_weights(age, shift_end):
    # nouns give way to verbs until shift_end months, then the mix settles
    t = min(1.0, max(0.0, (age - 14.0) / (shift_end - 14.0)))
    return {"n": 0.55 - 0.35 * t, "v": 0.12 + 0.33 * t, "a": 0.06 + 0.04 * t,
            "r": 0.04 + 0.03 * t, "f": 0.23 - 0.05 * t}


ADULT_WEIGHTS = {"n": 0.22, "v": 0.28, "a": 0.08, "r": 0.05, "f": 0.37}


def age_string(months, day):
    return "%d;%02d.%02d" % (months // 12, months % 12, day)


CHILDREN = [
    # name, sex, session ages in months, months at which the shift completes
    ("Ann", "female", [14, 19, 25, 31, 37, 45, 53], 30),
    ("Ben", "male", [16, 22, 27, 33, 40, 48, 58], 33),
    ("Cara", "female", [15, 21, 28, 34, 42, 50], 31),
    ("Dan", "male", [18, 24, 30, 36, 44, 52, 57], 32),
]


def speaker_block(rng, code, weights, n_utts, lo, hi, extras_rate):
    lines = []
    for _ in range(n_utts):
        extras = []
        for kind, p in extras_rate.items():
            if rng.random() < p:
                extras.append(kind)
        main, mor = utterance(rng, weights, rng.randint(lo, hi), extras)
        lines.append((code, main, mor))
    return lines


def gen_session(rng, child, idx, months):
    name, sex, ages, shift_end = child
    day = rng.randint(0, 29)
    age = months + day / 30.4375
    speakers = [("CHI", name, "Target_Child"), ("MOT", None, "Mother")]
    has_father = idx % 2 == 1
    has_inv = idx % 3 == 0
    has_sis = name == "Ben" and idx in (2, 4)
    if has_father:
        speakers.append(("FAT", None, "Father"))
    if has_inv:
        speakers.append(("INV", None, "Investigator"))
    if has_sis:
        speakers.append(("SIS", None, "Sister"))

    # youngest sessions are short: too few child content tokens to sample
    child_utts = 18 if idx == 0 else rng.randint(34, 44)
    child_len = (1, 3) if months < 24 else (2, 5)
    blocks = [speaker_block(rng, "CHI", child_weights(age, shift_end), child_utts, *child_len,
                            {"xxx": 0.08, "name": 0.03, "retrace": 0.04})]
    blocks.append(speaker_block(rng, "MOT", ADULT_WEIGHTS, rng.randint(34, 42), 3, 7,
                                {"name": 0.08, "filler": 0.05, "cafe": 0.01, "retrace": 0.03}))
    if has_father:
        blocks.append(speaker_block(rng, "FAT", ADULT_WEIGHTS, rng.randint(30, 36), 3, 7,
                                    {"name": 0.05, "filler": 0.05}))
    if has_inv:
        blocks.append(speaker_block(rng, "INV", ADULT_WEIGHTS, rng.randint(30, 36), 3, 7,
                                    {"filler": 0.04}))
    if has_sis:
        blocks.append(speaker_block(rng, "SIS", child_weights(age, shift_end), 10, 2, 4, {}))

    # interleave speakers turn by turn
    turns = []
    while any(blocks):
        for b in blocks:
            if b:
                turns.append(b.pop(0))

    session_id = "%s%02d" % (name.lower(), idx + 1)
    parts = []
    for code, nm, role in speakers:
        parts.append("%s %s %s" % (code, nm, role) if nm else "%s %s" % (code, role))
    out = ["@UTF8", "@Begin", "@Languages:\teng", "@Participants:\t" + ", ".join(parts)]
    for code, nm, role in speakers:
        if code == "CHI":
            out.append("@ID:\teng|Mini|CHI|%s|%s|||Target_Child|||" % (age_string(months, day), sex))
        else:
            out.append("@ID:\teng|Mini|%s|||||%s|||" % (code, role))
    out.append("@Media:\t%s, audio" % session_id)
    out.append("@Comment:\tsynthetic session generated for tests")
    for code, main, mor in turns:
        out.append("*%s:\t%s" % (code, main))
        out.append("%%mor:\t%s" % mor)
    out.append("@End")
    write("mini/%s/%s.cha" % (name, session_id), "\n".join(out) + "\n")


def gen_corpus(rng):
    for child in CHILDREN:
        for idx, months in enumerate(child[2]):
            gen_session(rng, child, idx, months)


def main():
    gen_wordnet(random.Random(11))
    gen_semcor(random.Random(12))
    gen_names()
    gen_corpus(random.Random(13))


if __name__ == "__main__":
    main()
