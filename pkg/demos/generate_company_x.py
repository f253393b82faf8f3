"""Generate the Company X policy, then lint what was generated.

Run from the repository root:  python3 demos/generate_company_x.py [out_dir]
"""

import sys
from pathlib import Path

from policylint.templategen import generate, load_config

CONFIG = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "templates" / "company_x.conf"


def main(argv: list[str]) -> None:
    policy = generate(load_config(CONFIG))
    print(policy.title)
    for section, check in zip(policy.sections, policy.checks):
        print(f"  {section.title:24} {check.stats.word_count:3} words  gfi {check.stats.gfi:5.2f}")

    report = policy.report
    print(f"\nwhole document: gfi {report.stats.gfi:.2f}, verdict {report.verdict}")
    for f in report.findings:
        if f.status != "satisfied":
            print(f"  {f.rule_id}: {f.status}  {f.remediation or f.message}")

    if argv:
        out = Path(argv[0])
        out.mkdir(parents=True, exist_ok=True)
        (out / "company-x.md").write_text(policy.markdown, encoding="utf-8")
        (out / "company-x.html").write_text(policy.html, encoding="utf-8")
        print(f"\nwrote {out / 'company-x.md'} and {out / 'company-x.html'}")


if __name__ == "__main__":
    main(sys.argv[1:])
