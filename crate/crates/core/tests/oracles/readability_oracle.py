"""Independent readability oracle used to freeze the goldens in acceptance.rs.

Counts are taken with regular expressions rather than a character scanner,
and the formulas are evaluated in exact rational arithmetic before rounding.
Run: python3 readability_oracle.py
"""
import re
from fractions import Fraction as F
from pathlib import Path

EASY = {
    w.strip().lower()
    for w in (Path(__file__).resolve().parents[2] / "resources" / "dale_chall_easy_words.txt")
    .read_text()
    .splitlines()
    if w.strip()
}

TEXTS = [
    "Great pizza. So good! We came back twice.",
    "The restaurant offered an extraordinary tasting menu. Every course was beautifully "
    "balanced, and the sommelier's recommendations were impeccable.",
    "Cheap eats!!! I'd rate the fish-and-chips 5/5... Honestly, unbelievable value; "
    "the table was sticky though. Parking? Impossible",
]


def words(text):
    out = []
    for run in re.findall(r"[\w'’-]+", text):
        run = re.sub(r"^[^\w]+|[^\w]+$", "", run.replace("_", " ")).strip()
        run = re.sub(r"^['’-]+|['’-]+$", "", run)
        if run:
            out.append(run)
    return out


def sentences(text):
    parts = re.split(r"[.!?]+(?=\s|$)", text)
    return max(1, sum(1 for p in parts if re.search(r"\w", p)))


def syllables(word):
    w = word.lower()
    n = len(re.findall(r"[aeiouy]+", w))
    if w.endswith("e") and not re.search(r"[b-df-hj-np-tv-xz]le$", w):
        n -= 1
    return max(1, n)


def stats(text):
    ws = words(text)
    s = dict(
        sentences=sentences(text),
        words=len(ws),
        characters=sum(len(re.findall(r"[a-zA-Z0-9]", w)) for w in ws),
        letters=sum(len(re.findall(r"[a-zA-Z]", w)) for w in ws),
        syllables=sum(syllables(w) for w in ws),
        complex_words=sum(1 for w in ws if syllables(w) >= 3),
        easy_words=sum(1 for w in ws if syllables(w) <= 2),
        long_words=sum(1 for w in ws if len(re.findall(r"[a-zA-Z]", w)) >= 7),
        difficult_words=sum(1 for w in ws if re.search(r"[a-zA-Z]", w) and w.lower() not in EASY),
    )
    return s, ws


def scores(s):
    W, S = F(s["words"]), F(s["sentences"])
    wps, spw = W / S, F(s["syllables"]) / W
    diff_pct = 100 * F(s["difficult_words"]) / W
    dc = F("0.1579") * diff_pct + F("0.0496") * wps
    if diff_pct > 5:
        dc += F("3.6365")
    r = (F(s["easy_words"]) + 3 * F(s["complex_words"])) / S
    return dict(
        ari=F("4.71") * F(s["characters"]) / W + F("0.5") * wps - F("21.43"),
        coleman_liau=F("0.0588") * 100 * F(s["letters"]) / W - F("0.296") * 100 * S / W - F("15.8"),
        dale_chall=dc,
        flesch_kincaid=F("0.39") * wps + F("11.8") * spw - F("15.59"),
        flesch_reading=F("206.835") - F("1.015") * wps - F("84.6") * spw,
        gunning_fog=F("0.4") * (wps + 100 * F(s["complex_words"]) / W),
        linsear=r / 2 if r > 20 else (r - 2) / 2,
        lix=wps + 100 * F(s["long_words"]) / W,
    )


def cross_check(s):
    """Feeds these counts into textstat's formula code and returns
    (ours, textstat) per metric. Only the formula layer is compared."""
    try:
        import importlib
    except ImportError:
        return {}
    m = lambda name: importlib.import_module(f"textstat.backend.metrics.{name}")
    W, S = s["words"], s["sentences"]
    patches = dict(
        words_per_sentence=lambda *a, **k: W / S,
        syllables_per_word=lambda *a, **k: s["syllables"] / W,
        chars_per_word=lambda *a, **k: s["characters"] / W,
        letters_per_word=lambda *a, **k: s["letters"] / W,
        sentences_per_word=lambda *a, **k: S / W,
        count_words=lambda *a, **k: W,
        count_long_words=lambda *a, **k: s["long_words"],
    )
    try:
        mods = {n: m(n) for n in ["_flesch_reading_ease", "_flesch_kincaid_grade", "_automated_readability_index",
                                  "_coleman_liau_index", "_gunning_fog", "_dale_chall_readability_score", "_lix"]}
    except ImportError:
        return "textstat not installed"
    for mod in mods.values():
        for k, v in patches.items():
            if hasattr(mod, k):
                setattr(mod, k, v)
    mods["_gunning_fog"].count_difficult_words = lambda *a, **k: s["complex_words"]
    mods["_dale_chall_readability_score"].count_difficult_words = lambda *a, **k: s["difficult_words"]
    key = repr(s)
    theirs = dict(
        flesch_reading=mods["_flesch_reading_ease"].flesch_reading_ease(key, "en_US"),
        flesch_kincaid=mods["_flesch_kincaid_grade"].flesch_kincaid_grade(key, "en_US"),
        ari=mods["_automated_readability_index"].automated_readability_index(key),
        coleman_liau=mods["_coleman_liau_index"].coleman_liau_index(key),
        gunning_fog=mods["_gunning_fog"].gunning_fog(key, "en_US"),
        dale_chall=mods["_dale_chall_readability_score"].dale_chall_readability_score(key, "en_US"),
        lix=mods["_lix"].lix(key),
    )
    ours = scores(s)
    return {k: (round(float(ours[k]), 6), round(float(v), 6)) for k, v in theirs.items()}


if __name__ == "__main__":
    for t in TEXTS:
        s, ws = stats(t)
        print(t)
        print("  words:", ws)
        print("  stats:", s)
        for k, v in scores(s).items():
            print(f"  {k:15s} {float(v):.10f}")
        print("  cross-check (ours, textstat):", cross_check(s))
