"""Writes tests/fixtures/golden_squad.json.

Offsets are computed with Python string indexing, i.e. in Unicode scalar
values, independently of the C++ implementation.
"""
import json
import sys

CONTEXTS = [
    ("topic-0-0", 0, "He is afraid to leave the house most days. The voices get louder at night, "
     "so sleep is short. Café trips help a little — naïve, maybe."),
    ("topic-0-1", 0, "My doctor suggested walking every morning. Memory problems started after the "
     "second episode. I keep a diary now."),
    ("topic-1-0", 1, "I stopped drinking coffee last month. Since then the hallucinations are milder. "
     "Green tea is my replacement \U0001F375 these days."),
    ("topic-2-0", 2, "Family dinners are hard because everyone watches me. Medication makes me tired "
     "but steady. Work is part-time for now."),
]

QUESTIONS = {
    "topic-0-0": [("afraid of", "afraid of", "What is a schizophrenic afraid of?",
                   ["afraid to leave the house", "He is afraid to leave the house most days"]),
                  ("sleep", "default", "What about sleep?", ["sleep is short"]),
                  ("trips", "default", "What about trips?", ["help a little — naïve"])],
    "topic-0-1": [("memory", "default", "What about memory?", ["after the second episode"]),
                  ("doctor", "default", "What about doctor?", ["walking every morning", "I keep a diary now"])],
    "topic-1-0": [("drinking", "drink.*", "What does a schizophrenic stop with?", ["coffee"]),
                  ("hallucinations", "default", "What about hallucinations?",
                   ["Green tea is my replacement \U0001F375 these days", "stopped drinking coffee"])],
    "topic-2-0": [("family", "default", "What about family?", ["everyone watches me"]),
                  ("medication", "default", "What about medication?", ["makes me tired but steady"])],
}


def main(out):
    articles = {}
    for pid, topic, ctx in CONTEXTS:
        qas = []
        for n, (aspect, qtype, question, answers) in enumerate(QUESTIONS[pid]):
            qid = f"{pid}-q{n}"
            rendered = []
            for text in answers:
                assert ctx.count(text) == 1, text
                start = ctx.index(text)
                rendered.append({"answer_id": f"{qid}@{start}-{start + len(text)}",
                                 "answer_start": start, "text": text})
            qas.append({"id": qid, "question": question, "aspect": aspect, "question_type": qtype,
                        "needs_review": qtype == "default", "answers": rendered})
        articles.setdefault(topic, []).append(
            {"paragraph_id": pid, "topic_id": topic, "context": ctx, "qas": qas})
    data = [{"title": f"topic-{t}", "paragraphs": ps} for t, ps in sorted(articles.items())]
    with open(out, "w", encoding="utf-8") as f:
        f.write(json.dumps({"version": "1.1", "data": data}, sort_keys=True, indent=2, ensure_ascii=False))
        f.write("\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures/golden_squad.json")
