"""Reference BLEU from sacrebleu with its tokenizer disabled (whitespace tokens)."""
import sacrebleu
from common import fixture

hyp = open(fixture("bleu", "hyp.txt"), encoding="utf-8").read().split("\n")[:-1]
ref = open(fixture("bleu", "ref.txt"), encoding="utf-8").read().split("\n")[:-1]
weak = open(fixture("bleu", "hyp_weak.txt"), encoding="utf-8").read().split("\n")[:-1]
for name, h in (("hyp", hyp), ("hyp_weak", weak)):
    b = sacrebleu.corpus_bleu(h, [ref], tokenize="none", force=True)
    print(name, "sacrebleu", sacrebleu.__version__, "score", repr(b.score), "counts", b.counts, "totals", b.totals,
          "sys_len", b.sys_len, "ref_len", b.ref_len)
