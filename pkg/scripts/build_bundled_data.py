"""Regenerate the data files bundled under src/ghabuse/data/.

    python scripts/build_bundled_data.py

Output is deterministic; rerunning leaves the files byte-identical.
"""

import json
import random
from pathlib import Path

from ghabuse.evalharness.textgen import TOPICS, ham_issue, readme_text, spam_issue

DATA = Path(__file__).resolve().parents[1] / "src" / "ghabuse" / "data"
BACKGROUND_SEED = 20_200
SPAM_SEED = 31_337


def background_readmes(n: int = 200) -> list[dict]:
    rng = random.Random(BACKGROUND_SEED)
    topics = sorted(TOPICS)
    docs = []
    for i in range(n):
        topic = topics[i % len(topics)]
        name = f"{rng.choice(TOPICS[topic])}-{rng.choice(['kit', 'lib', 'tools', 'core', 'lite', 'py', 'js', 'rs'])}{i}"
        docs.append({"id": f"background/{name}", "text": readme_text(rng, topic, name)})
    return docs


def spam_training_rows(n_each: int = 300) -> list[dict]:
    rng = random.Random(SPAM_SEED)
    rows = []
    for i in range(n_each):
        mode = i % 6
        title, body = spam_issue(rng, link=mode < 4, command=mode in (3, 4))
        rows.append({"text": f"{title}\n{body}", "label": 1})
        owner, name = f"dev{rng.randint(1, 500)}", rng.choice(sorted(TOPICS))
        title, body = ham_issue(rng, owner, name, link=mode in (1, 2, 5), command=mode in (2, 3))
        rows.append({"text": f"{title}\n{body}", "label": 0})
    return rows


def main() -> None:
    DATA.mkdir(parents=True, exist_ok=True)
    (DATA / "background_readmes.json").write_text(
        json.dumps(background_readmes(), indent=1, ensure_ascii=False) + "\n", encoding="utf-8"
    )
    with open(DATA / "spam_train.jsonl", "w", encoding="utf-8") as fh:
        for row in spam_training_rows():
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    main()
