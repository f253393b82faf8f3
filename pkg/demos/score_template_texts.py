"""Score the six template section texts and show where the counts come from.

Run from the repository root:  python3 demos/score_template_texts.py
"""

from pathlib import Path

from policylint.textmetrics import ExclusionPolicy, complex_words, compute_stats

ROWS = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "template_rows"
REFERENCE_GFI = {"gdpr1": 8.457, "gdpr2": 10.30, "gdpr3": 5.822, "gdpr4": 9.73, "gdpr5": 11.40, "gdpr6d": 11.67}


def main() -> None:
    print(f"{'text':8} {'words':>5} {'sents':>5} {'cmplx':>5} {'gfi':>6} {'ref':>6}  complex words")
    for name, ref in REFERENCE_GFI.items():
        text = (ROWS / f"{name}.txt").read_text(encoding="utf-8")
        s = compute_stats(text)
        flag = "" if abs(s.gfi - ref) <= 1.0 else "  (off by more than 1)"
        print(f"{name:8} {s.word_count:5} {s.sentence_count:5} {s.complex_word_count:5} "
              f"{s.gfi:6.2f} {ref:6.2f}  {', '.join(complex_words(text))}{flag}")

    # The proper-noun exclusion is the biggest lever on these short texts.
    print("\nwith the proper-noun exclusion switched off:")
    policy = ExclusionPolicy(proper_nouns=False)
    for name in ("gdpr4", "gdpr6d"):
        text = (ROWS / f"{name}.txt").read_text(encoding="utf-8")
        print(f"  {name}: gfi {compute_stats(text, policy).gfi:.2f}, complex = {complex_words(text, policy)}")


if __name__ == "__main__":
    main()
