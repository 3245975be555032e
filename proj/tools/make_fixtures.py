#!/usr/bin/env python3
"""Regenerates the committed test fixtures under data/fixtures.

Output is a pure function of the constants below; rerunning it must leave
`git status` clean. Expected values derived from these files live in
tests/oracles and are frozen into the C++ tests.
"""

import json
import math
import os
import random
import sys

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "data", "fixtures")

WORDS = (
    "the a small large red blue green old new quiet busy river city market school garden window "
    "teacher farmer doctor child friend writer sees finds builds opens carries paints visits "
    "near behind under above with without today yesterday slowly quickly boat house bridge "
    "letter song road tree bird cloud morning evening"
).split()

ZH_CHARS = "的一是在不了有和人这中大为上个国我以要他时来用们生到作地于出就分对成会可主发年动同工也能下过子说产种面而方后多定行学法所民得经十三之进着等部度家电力里如水化高自二理起小物现实加量都两体制机当使点从业本去把性好应开它合还因由其些然前外天政四日那社义事平形相全表间样与关各重新线内数正心反你明看原又么利比或但质气第向道命此变条只没结解问意建月公无系军很情者最立代想已通并提直题党程展五果料象员革位入常文总次品式活设及管特件长求老头基资边流路级少图山统接知较将组见计别她手角期根论运农指几九区强放决西被干做必战先回则任取据处队南给色光门即保治北造百规热领七海口东导器压志世金增争济阶油思术极交受联什认六共权收证改清己美再采转更单风切打白教速花带安场身车例真务具万每目至达走积示议声报斗完类八离华名确才科张信马节话米整空元况今集温传土许步群广石记需段研界拉林律叫且究观越织装影算低持音众书布复容儿须际商非验连断深难近矿千周委素技备半办青省列习响约支般史感劳便团往酸历市克何除消构府称太准精值号率族维划选标写存候毛亲快效斯院查江型眼王按格养易置派层片始却专状育厂京识适属圆包火住调满县局照参红细引听该铁价严"
AR_CHARS = "ابتثجحخدذرزسشصضطظعغفقكلمنهوي"


def word_map(chars, seed, length):
    rng = random.Random(seed)
    used = set()
    out = {}
    for w in WORDS:
        while True:
            t = "".join(rng.choice(chars) for _ in range(length))
            if t not in used:
                used.add(t)
                out[w] = t
                break
    return out


ZH = word_map(ZH_CHARS, 11, 2)
AR = word_map(AR_CHARS, 12, 4)


def english_sentence(rng, n_min=4, n_max=10):
    n = rng.randint(n_min, n_max)
    return " ".join(rng.choice(WORDS) for _ in range(n)) + " ."


def to_zh(en):
    return "".join(ZH.get(w, "。") for w in en.split())


def to_ar(en):
    return " ".join(AR.get(w, ".") for w in en.split())


def write(path, text):
    full = os.path.join(ROOT, path)
    os.makedirs(os.path.dirname(full), exist_ok=True)
    with open(full, "w", encoding="utf-8", newline="") as f:
        f.write(text)


def write_json(path, obj):
    write(path, json.dumps(obj, ensure_ascii=False, indent=2) + "\n")


def unique_sentences(rng, count, seen):
    out = []
    while len(out) < count:
        s = english_sentence(rng)
        if s not in seen:
            seen.add(s)
            out.append(s)
    return out


def corpus_1k():
    """1,000 lines: 600 mined en-zh (60 below threshold, 20 repeats) and 400 ar-en (10 repeats)."""
    rng = random.Random(1000)
    seen = set()
    zh_sent = unique_sentences(rng, 580, seen)
    lines = []
    low = set(rng.sample(range(580), 60))
    for i, s in enumerate(zh_sent):
        score = round(rng.uniform(0.95, 1.035), 4) if i in low else round(rng.uniform(1.04, 1.30), 4)
        lines.append(f"{score}\t{s}\t{to_zh(s)}")
    keep = [i for i in range(580) if i not in low]
    for i in rng.sample(keep, 20):
        parts = lines[i].split("\t")
        # repeated pair with different spacing and a fresh score
        lines.append(f"{round(rng.uniform(1.04, 1.3), 4)}\t{parts[1].replace(' ', '  ', 1)}\t{parts[2]}")
    rng.shuffle(lines)
    write("corpus_1k/wikimatrix.en-zh.tsv", "\n".join(lines) + "\n")

    ar_sent = unique_sentences(rng, 390, seen)
    lines = [f"{to_ar(s)}\t{s}" for s in ar_sent]
    for i in rng.sample(range(390), 10):
        lines.append(lines[i])
    rng.shuffle(lines)
    write("corpus_1k/news-commentary.ar-en.tsv", "\n".join(lines) + "\n")

    write_json("corpus_1k/manifest.json", {
        "corpora": [
            {"corpus_name": "WikiMatrix", "file_path": "wikimatrix.en-zh.tsv", "format": "wikimatrix_tsv",
             "source_lang": "en", "target_lang": "zh"},
            {"corpus_name": "NewsCommentary", "file_path": "news-commentary.ar-en.tsv", "format": "tab_pair",
             "source_lang": "ar", "target_lang": "en", "pair_count": 400},
        ]
    })

    # general-task seed and its row-aligned translations
    rows = []
    for i in range(40):
        instr = english_sentence(rng, 5, 9)
        inp = english_sentence(rng, 3, 6) if i % 3 == 0 else ""
        out = english_sentence(rng, 6, 12)
        rows.append((instr, inp, out))

    def alpaca(conv):
        return [{"instruction": conv(a), "input": conv(b) if b else "", "output": conv(c)} for a, b, c in rows]

    write_json("corpus_1k/alpaca_en.json", alpaca(lambda s: s))
    write_json("corpus_1k/alpaca_zh.json", alpaca(to_zh))
    write_json("corpus_1k/alpaca_ar.json", alpaca(to_ar))
    write_json("corpus_1k/recipe.json", {
        "seed": 20240417,
        "general_sources": [
            {"lang": "en", "file_path": "alpaca_en.json"},
            {"lang": "zh", "file_path": "alpaca_zh.json"},
            {"lang": "ar", "file_path": "alpaca_ar.json"},
        ],
        "translation_amounts": {"zh": 200, "ar": 150},
        "directions": {"zh": "en_to_x", "ar": "both_split"},
    })

    # sentence embeddings for en/zh/ar: shared base plus a language offset
    erng = random.Random(77)
    dim = 8
    base = [[erng.gauss(0, 1) for _ in range(dim)] for _ in range(24)]
    offset = {"en": [0.0] * dim,
              "zh": [erng.gauss(0, 0.9) for _ in range(dim)],
              "ar": [erng.gauss(0, 0.6) for _ in range(dim)]}
    lines = []
    for lang in ("en", "zh", "ar"):
        for sid, v in enumerate(base):
            vec = [round(x + o + erng.gauss(0, 0.2), 6) for x, o in zip(v, offset[lang])]
            lines.append(json.dumps({"lang": lang, "sentence_id": sid, "vector": vec}))
    write("corpus_1k/embeddings.jsonl", "\n".join(lines) + "\n")

    # observed (data_scale, score) points per language
    for lang, (alpha, beta, gamma) in {"zh": (30.0, -0.25, 0.55), "ar": (45.0, -0.3, 0.45)}.items():
        prng = random.Random(hash_lang(lang))
        out = ["data_scale\tscore"]
        for x in (1000, 2000, 5000, 10000, 20000, 50000, 100000, 200000):
            s = 100.0 - alpha * (gamma * x) ** beta * math.exp(prng.gauss(0, 0.01))
            out.append(f"{x}\t{s:.6f}")
        write(f"corpus_1k/fit_points_{lang}.tsv", "\n".join(out) + "\n")


def hash_lang(lang):
    return sum(ord(c) * 31 ** i for i, c in enumerate(lang))


def malformed_3file():
    """Three files, 1,000 lines, 12 malformed lines in total."""
    rng = random.Random(3000)
    seen = set()
    specs = [("a.wikimatrix.tsv", "wikimatrix_tsv", 400, 5),
             ("b.pairs.tsv", "tab_pair", 350, 4),
             ("c.pairs.tsv", "tab_pair", 250, 3)]
    entries = []
    for name, fmt, n, bad in specs:
        good = unique_sentences(rng, n - bad, seen)
        lines = [f"{round(rng.uniform(1.05, 1.2), 3)}\t{s}\t{to_zh(s)}" if fmt == "wikimatrix_tsv" else f"{s}\t{to_zh(s)}"
                 for s in good]
        broken = ["only one field", "", "x\ty\tz\tw", "\t   \tempty source", "not-a-score\tHello .\t你好"]
        if fmt == "tab_pair":
            broken = ["only one field", "", "a\tb\tc", "   \tblank source"]
        for b in broken[:bad]:
            lines.insert(rng.randrange(len(lines) + 1), b)
        write(f"malformed_3file/{name}", "\n".join(lines) + "\n")
        entries.append({"corpus_name": name.split(".")[0], "file_path": name, "format": fmt,
                        "source_lang": "en", "target_lang": "zh"})
    # distinct (name, src, tgt) triples
    write_json("malformed_3file/manifest.json", {"corpora": entries})


def dedup_500():
    """500 pairs of which 37 repeat an earlier pair (some with extra whitespace)."""
    rng = random.Random(500)
    uniq = unique_sentences(rng, 463, set())
    lines = [f"{s}\t{to_zh(s)}" for s in uniq]
    for k in range(37):
        i = rng.randrange(len(uniq))
        s = uniq[i]
        if k % 3 == 1:
            s = "  " + s.replace(" ", "   ", 2) + " "
        lines.insert(rng.randrange(i + 1, len(lines) + 1), f"{s}\t{to_zh(uniq[i])}")
    # same source, different target: distinct pairs
    write("dedup_500/pairs.tsv", "\n".join(lines) + "\n")


def moses():
    rng = random.Random(42)
    sents = unique_sentences(rng, 30, set())
    write("moses/small.en", "\n".join(sents) + "\n")
    write("moses/small.zh", "\n".join(to_zh(s) for s in sents) + "\n")


def bleu_10():
    rng = random.Random(10)
    refs, hyps = [], []
    for i in range(10):
        ref = english_sentence(rng, 8, 16).split()
        hyp = list(ref)
        for _ in range(rng.randint(0, 5)):
            op = rng.random()
            j = rng.randrange(len(hyp))
            if op < 0.4:
                hyp[j] = rng.choice(WORDS)
            elif op < 0.7 and len(hyp) > 3:
                del hyp[j]
            else:
                hyp.insert(j, rng.choice(WORDS))
        refs.append(" ".join(ref))
        hyps.append(" ".join(hyp))
    write("bleu/ref.txt", "\n".join(refs) + "\n")
    write("bleu/hyp.txt", "\n".join(hyps) + "\n")
    # a weaker system for significance tests
    weak = []
    for h in hyps:
        t = h.split()
        weak.append(" ".join(t[: max(2, len(t) * 2 // 3)]))
    write("bleu/hyp_weak.txt", "\n".join(weak) + "\n")
    write("bleu/ref_zh.txt", "\n".join(to_zh(r) for r in refs) + "\n")
    write("bleu/hyp_zh.txt", "\n".join(to_zh(h) for h in hyps) + "\n")


def qa_20():
    """Hand-labelled exact-match fixture: 'em' is the expected per-item verdict."""
    items = [
        ("New England Patriots", "new england patriots.", 1),
        ("New England Patriots", "The New England Patriots", 0),
        ("1066", "1066", 1),
        ("1066", " 1066 ", 1),
        ("Paris", "paris!", 1),
        ("Paris", "Paris, France", 0),
        ("新英格兰爱国者队", "新英格兰爱国者队。", 1),
        ("新英格兰爱国者队", "爱国者队", 0),
        ("القاهرة", "القاهرة؟", 1),
        ("القاهرة", "الاسكندرية", 0),
        ("Marie Curie", "marie   curie", 1),
        ("Marie Curie", "", 0),
        ("ΑΘΗΝΑ", "αθηνα", 1),
        ("İstanbul", "istanbul", 0),
        ("Hà Nội", "hà nội;", 1),
        ("42", "forty-two", 0),
        ("blue", "Blue.", 1),
        ("blue", "blue green", 0),
        ("the river", "The River?", 1),
        ("yes", "no", 0),
    ]
    lines = []
    for i, (ref, hyp, em) in enumerate(items):
        lines.append(json.dumps({"id": f"q{i:02d}", "context": f"Context for question {i}.",
                                 "question": f"Question {i}?", "reference_answer": ref, "hypothesis": hyp,
                                 "lang": "xx", "em": em}, ensure_ascii=False))
    write("qa/qa_20.jsonl", "\n".join(lines) + "\n")
    base = []
    for i, (ref, hyp, em) in enumerate(items):
        base.append(json.dumps({"id": f"q{i:02d}", "context": f"Context for question {i}.",
                                "question": f"Question {i}?", "reference_answer": ref,
                                "hypothesis": hyp if i % 4 else "unrelated", "lang": "xx"}, ensure_ascii=False))
    write("qa/qa_20_baseline.jsonl", "\n".join(base) + "\n")


def bootstrap_scores():
    rng = random.Random(4242)
    a, b = ["id\tscore"], ["id\tscore"]
    for i in range(60):
        base = rng.uniform(60, 90)
        a.append(f"s{i:03d}\t{base + rng.gauss(1.0, 3.0):.4f}")
        b.append(f"s{i:03d}\t{base:.4f}")
    write("scores/system_a.tsv", "\n".join(a) + "\n")
    write("scores/system_b.tsv", "\n".join(b) + "\n")
    rng = random.Random(1012)
    rows = [f"seg{i:04d}\t{rng.uniform(0.5, 0.95):.6f}" for i in range(1012)]
    write("scores/comet_1012.tsv", "\n".join(rows) + "\n")


def embeddings():
    # 5 hand-specified multi-way pairs for the similarity oracle
    en = [[1, 0, 0], [0, 1, 0], [1, 1, 0], [1, 2, 3], [0.5, -1, 2]]
    zh = [[1, 1, 0], [0, 1, 1], [2, 2, 0.5], [3, 2, 1], [-0.5, -1, 2]]
    lines = [json.dumps({"lang": "en", "sentence_id": i, "vector": v}) for i, v in enumerate(en)]
    lines += [json.dumps({"lang": "zh", "sentence_id": i, "vector": v}) for i, v in enumerate(zh)]
    write("embeddings/five_pairs.jsonl", "\n".join(lines) + "\n")

    # 40 points, 2 languages x 20 ids, two layers: overlapping at layer 0, apart at layer 1
    rng = random.Random(40)
    lines = []
    for layer, shift in ((0, 0.3), (1, 3.0)):
        for lang, sign in (("en", 1), ("zh", -1)):
            for sid in range(20):
                vec = [round(rng.gauss(0, 1) + (sign * shift if d == 0 else 0.0), 6) for d in range(5)]
                lines.append(json.dumps({"lang": lang, "sentence_id": sid, "vector": vec, "layer": layer}))
    write("embeddings/layers_40.jsonl", "\n".join(lines) + "\n")

    # 5 points in 3-D for the PCA oracle
    pts = [[2.0, 0.5, -1.0], [-1.0, 1.5, 0.25], [0.5, -2.0, 1.0], [3.0, 1.0, 0.0], [-0.5, -0.5, 2.5]]
    lines = [json.dumps({"lang": "en" if i % 2 == 0 else "zh", "sentence_id": i, "vector": v, "layer": 0})
             for i, v in enumerate(pts)]
    write("embeddings/pca_5.jsonl", "\n".join(lines) + "\n")


def fit_points():
    write("fit/two_point.tsv", "data_scale\tscore\n1\t96\n4\t98\n")
    rng = random.Random(12)
    alpha, beta, gamma = 12.0, -0.2, 0.6
    out = ["data_scale\tscore"]
    for x in (100, 300, 1000, 3000, 10000, 30000, 100000, 300000, 1000000, 3000000):
        s = 100.0 - alpha * (gamma * x) ** beta * math.exp(rng.gauss(0, 0.01))
        out.append(f"{x}\t{s:.12f}")
    write("fit/noisy_10.tsv", "\n".join(out) + "\n")


def mieval():
    rng = random.Random(7)
    seeds = [english_sentence(rng, 5, 10) for _ in range(10)]
    seeds[3] = "Write a haiku\tabout tabs."
    write("mieval/seed.txt", "\n".join(s.replace("\t", "\\t") for s in seeds) + "\n")
    write("mieval/zh.txt", "\n".join(to_zh(s.replace("\t", " ")) for s in seeds) + "\n")
    write("mieval/ar.txt", "\n".join(to_ar(s.replace("\t", " ")) for s in seeds) + "\n")


def judge_mock():
    """Judge replies with the verdict a correct parser must recover (null = must be flagged)."""
    cases = [
        ("correctness", "YES", True),
        ("correctness", "NO", False),
        ("correctness", "yes", True),
        ("correctness", "No.", False),
        ("correctness", "Correctness: NO, the answer copies the context.", False),
        ("correctness", "Evaluation Form (YES or NO): YES", True),
        ("correctness", "Evaluation Form (YES or NO): NO", False),
        ("correctness", "The answer matches the passage.\nEvaluation Form (YES or NO):\nYES", True),
        ("correctness", "Evaluation Form: no", False),
        ("correctness", "I would say yes, but the evaluation form requires: NO", False),
        ("correctness", "YES.\n\nThe answer is accurate.", True),
        ("correctness", "**YES**", True),
        ("correctness", "Answer: NO, wrong team.", False),
        ("correctness", "Evaluation Form (YES or NO): Yes, it is correct.", True),
        ("correctness", "Not correct. NO", False),
        ("correctness", "答案：YES", True),
        ("correctness", "evaluation form (yes or no): no", False),
        ("correctness", "The answer is correct. Evaluation Form (YES or NO): YES. Nothing else.", True),
        ("correctness", "Nobody would accept this; YES it is right.", True),
        ("correctness", "yesterday's answer: NO", False),
        ("correctness", "", None),
        ("correctness", "The answer seems plausible.", None),
        ("correctness", "Evaluation Form (YES or NO):", None),
        ("correctness", "Maybe. Hard to tell.", None),
        ("correctness", "Yesno", None),
        ("pairwise", "Evaluation evidence: both fine.\nScore of the Assistant 1: 8\nScore of the Assistant 2: 6", (8, 6)),
        ("pairwise", "Score of the Assistant 1: 7\nScore of the Assistant 2: 7", (7, 7)),
        ("pairwise", "Evaluation evidence: B is better.\nScore of the Assistant 1: 3\nScore of the Assistant 2: 9", (3, 9)),
        ("pairwise", "score of the assistant 1: 10\nscore of the assistant 2: 1", (10, 1)),
        ("pairwise", "Score of the Assistant 1: 6.5\nScore of the Assistant 2: 7.5", (6.5, 7.5)),
        ("pairwise", "Score of Assistant 1: 5\nScore of Assistant 2: 4", (5, 4)),
        ("pairwise", "Score of the Assistant 1:9\nScore of the Assistant 2:8", (9, 8)),
        ("pairwise", "Evaluation evidence: <Explanation>\nScore of the Assistant 1: 2\nScore of the Assistant 2: 2", (2, 2)),
        ("pairwise", "Score of the Assistant 2: 4\nScore of the Assistant 1: 6", (6, 4)),
        ("pairwise", "Draft: Score of the Assistant 1: 5\nFinal:\nScore of the Assistant 1: 8\nScore of the Assistant 2: 5", (8, 5)),
        ("pairwise", "Evaluation evidence: A is detailed, B is terse.\n\nScore of the Assistant 1: 9\nScore of the Assistant 2: 4\n", (9, 4)),
        ("pairwise", "SCORE OF THE ASSISTANT 1: 1\nSCORE OF THE ASSISTANT 2: 10", (1, 10)),
        ("pairwise", "Score of the Assistant 1: 7 \r\nScore of the Assistant 2: 8 \r\n", (7, 8)),
        ("pairwise", "Score of the Assistant 1: 4.0\nScore of the Assistant 2: 4.0", (4, 4)),
        ("pairwise", "Evaluation evidence: ok\nScore of the Assistant 1: 6\nScore of the Assistant 2: 3\nThanks!", (6, 3)),
        ("pairwise", "", None),
        ("pairwise", "Score of the Assistant 1: 8", None),
        ("pairwise", "Score of the Assistant 2: 8", None),
        ("pairwise", "Score of the Assistant 1: 11\nScore of the Assistant 2: 5", None),
        ("pairwise", "Score of the Assistant 1: 0\nScore of the Assistant 2: 5", None),
        ("pairwise", "Score of the Assistant 1: eight\nScore of the Assistant 2: six", None),
        ("pairwise", "Assistant 1 is better than Assistant 2.", None),
        ("pairwise", "Score of the Assistant 1: <Score>\nScore of the Assistant 2: <Score>", None),
        ("pairwise", "Score of the Assistant 1: -3\nScore of the Assistant 2: 5", None),
        ("pairwise", "Scores: 8 and 6", None),
    ]
    assert len(cases) == 50
    lines = []
    for i, (kind, resp, expected) in enumerate(cases):
        if isinstance(expected, tuple):
            expected = list(expected)
        lines.append(json.dumps({"case": i, "kind": kind, "response": resp, "expected": expected}, ensure_ascii=False))
    write("judge/mock_responses.jsonl", "\n".join(lines) + "\n")

    # scripted transport replies and matching QA items for dry runs
    replies = [json.dumps({"response": "Evaluation Form (YES or NO): " + ("YES" if i % 3 else "NO")}) for i in range(12)]
    write("judge/replies.jsonl", "\n".join(replies) + "\n")


def table5_problem():
    caps = {"ar": 1097200, "el": 620800, "hi": 234300, "tr": 477700, "vi": 1073800, "zh": 912500}
    langs = []
    for lang, (a, b, g) in zip(caps, [(30, -0.25, 0.4), (28, -0.22, 0.5), (35, -0.3, 0.3),
                                      (32, -0.27, 0.45), (26, -0.2, 0.6), (29, -0.24, 0.5)]):
        langs.append({"lang": lang, "alpha": a, "beta": b, "gamma": g, "cap": caps[lang]})
    write_json("allocation/six_languages.json", {"budget": 300000, "languages": langs})


def main():
    corpus_1k()
    malformed_3file()
    dedup_500()
    moses()
    bleu_10()
    qa_20()
    bootstrap_scores()
    embeddings()
    fit_points()
    mieval()
    judge_mock()
    table5_problem()
    return 0


if __name__ == "__main__":
    sys.exit(main())
