#!/usr/bin/env python3
"""Writes the bundled synthetic forum corpus used by the smoke run and tests.

Outputs (in data/synthetic unless --out is given):
  forum_posts.csv     200 posts with post_id, posted_at, username, body
  annotations.jsonl   recorded annotations {post_id, question, answer}
  two_cluster.jsonl   two groups of posts with disjoint vocabularies
  pipeline.json       pipeline config for the smoke run (oracle reader)
"""

import argparse
import csv
import datetime
import io
import json
import os
import random

THEMES = {
    "voices": {
        "sentences": [
            "The voices get louder when I am alone at home.",
            "My hallucinations started after a long stressful winter.",
            "Hearing voices at night makes it hard to relax.",
            "The voices told me terrible things about my neighbours.",
            "Visual hallucinations scare me more than the voices.",
            "Music with headphones helps me ignore the voices.",
            "When the hallucinations come I try to call a friend.",
        ],
        "questions": [
            "What helps with voices and hallucinations?",
            "When do the voices and hallucinations get worse?",
        ],
    },
    "coffee": {
        "sentences": [
            "I stopped drinking coffee because it made me anxious.",
            "Too much coffee and energy drinks keep my thoughts racing.",
            "Since I quit smoking I drink more coffee every morning.",
            "My psychiatrist asked me to stop drinking alcohol and coffee.",
            "Decaf coffee was the compromise that worked for me.",
            "Smoking and coffee were my daily habits for years.",
            "Drinking less coffee calmed my racing thoughts.",
        ],
        "questions": [
            "Why stop drinking coffee, smoking or alcohol?",
            "What happens after drinking coffee or smoking?",
        ],
    },
    "sleep": {
        "sentences": [
            "I sleep twelve hours a day on the new medication.",
            "Insomnia is the worst part of every relapse for me.",
            "Going to sleep at the same time each night helped a lot.",
            "Nightmares wake me up and then I cannot sleep again.",
            "My sleep schedule fell apart during the psychosis.",
            "A warm shower before bed improves my sleep.",
            "Without sleep the paranoia returns within days.",
        ],
        "questions": [
            "How does a schizophrenic sleep at night?",
            "What helps with sleep and insomnia?",
        ],
    },
    "medication": {
        "sentences": [
            "The medication made me gain weight in the first year.",
            "My doctor lowered the dose and the tremor went away.",
            "Taking pills every morning is part of my routine now.",
            "The side effects of the medication were hard at first.",
            "I never skip my meds since the last hospital stay.",
            "Changing medication took months of careful adjustment.",
            "The injection every month is easier than daily pills.",
        ],
        "questions": [
            "What do people say about medication, meds and pills?",
            "How does the medication dose change things?",
        ],
    },
    "family": {
        "sentences": [
            "My family did not understand the diagnosis at first.",
            "My mother drives me to every appointment.",
            "My father still thinks it is just laziness.",
            "Family dinners are difficult when the paranoia is strong.",
            "My parents joined a support group for families.",
            "My brother is the only one I trust with everything.",
            "Talking to my family openly made the house calmer.",
        ],
        "questions": [
            "How does a schizophrenic get along with family and parents?",
            "What does the family do to help?",
        ],
    },
    "fear": {
        "sentences": [
            "He is afraid to leave the house.",
            "I am afraid of crowded buses and supermarkets.",
            "The fear of being watched never fully goes away.",
            "She is scared that people can read her thoughts.",
            "I was afraid of the doctors for a long time.",
            "Fear of a relapse keeps me careful with stress.",
            "Being scared of cameras made shopping impossible.",
        ],
        "questions": [
            "What is a schizophrenic afraid of, scared of or in fear of?",
            "What fear or afraid feelings come up?",
        ],
    },
    "work": {
        "sentences": [
            "I went back to work part time after the hospital.",
            "My job coach helped me find a quiet workplace.",
            "Working night shifts made my symptoms worse.",
            "I told my boss about the diagnosis and it went well.",
            "Volunteering was a good step before a real job.",
            "Concentration at work is still hard some days.",
            "Losing my job was the start of a bad episode.",
        ],
        "questions": [
            "How does a schizophrenic cope with work and a job?",
            "What happened with work, working or the job?",
        ],
    },
    "memory": {
        "sentences": [
            "My memory got worse during the first episode.",
            "I forget appointments unless I write them down.",
            "Memory exercises on my phone help a little.",
            "Short term memory problems make reading difficult.",
            "I forget names of people I met last week.",
            "My therapist says memory often improves with time.",
            "Forgetting my keys every day drives me crazy.",
        ],
        "questions": [
            "How does schizophrenia affect memory or make people forget?",
            "What helps with memory when you forget things?",
        ],
    },
}

FILLER = [
    "Thanks for reading this.",
    "Hope everyone is doing okay today.",
    "Any advice is welcome.",
    "Sorry for the long story.",
]

USERNAMES = [
    "quietriver", "nightowl88", "Marta_K", "bluejay", "tomasz", "sunnydays", "ellen.w", "pathfinder",
    "greenleaf", "Jonah42", "calmwater", "stargazer", "lena_m", "oldoak", "Rafael", "mintcloud",
]

TWO_CLUSTER = {
    "kitchen": ["flour", "butter", "oven", "dough", "knead", "yeast", "bake", "crust", "sugar", "whisk"],
    "stadium": ["goal", "striker", "referee", "penalty", "league", "keeper", "tackle", "pitch", "offside", "match"],
}


def make_posts(rng, count):
    themes = sorted(THEMES)
    start = datetime.date(2019, 1, 1)
    posts = []
    for i in range(count):
        theme = themes[i % len(themes)]
        sentences = rng.sample(THEMES[theme]["sentences"], 2 + rng.randrange(2))
        author = USERNAMES[rng.randrange(len(USERNAMES))]
        body = " ".join(sentences)
        if rng.random() < 0.3:
            body += " " + rng.choice(FILLER)
        if rng.random() < 0.15:
            body = "@" + USERNAMES[rng.randrange(len(USERNAMES))] + " " + body
        posts.append({
            "post_id": "p%04d" % (i + 1),
            "posted_at": (start + datetime.timedelta(days=rng.randrange(900))).isoformat(),
            "username": author,
            "body": body,
            "theme": theme,
            "sentences": sentences,
        })
    return posts


def make_annotations(rng, posts):
    records = []
    for post in posts:
        if rng.random() < 0.4:
            continue
        questions = THEMES[post["theme"]]["questions"]
        records.append({
            "post_id": post["post_id"],
            "question": questions[rng.randrange(len(questions))],
            "answer": post["sentences"][0],
        })
    return records


def make_two_cluster(rng, per_cluster):
    rows = []
    for name, words in sorted(TWO_CLUSTER.items()):
        for i in range(per_cluster):
            body = " ".join(rng.choice(words) for _ in range(12 + rng.randrange(8))) + "."
            rows.append({
                "post_id": "%s-%03d" % (name, i),
                "posted_at": "2020-01-%02d" % (1 + i % 28),
                "author_ref": "u_%s" % name,
                "body": body,
            })
    return rows


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "..", "data", "synthetic"))
    parser.add_argument("--seed", type=int, default=20211)
    parser.add_argument("--posts", type=int, default=200)
    args = parser.parse_args()
    os.makedirs(args.out, exist_ok=True)
    rng = random.Random(args.seed)

    posts = make_posts(rng, args.posts)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["post_id", "posted_at", "username", "body"])
    for p in posts:
        writer.writerow([p["post_id"], p["posted_at"], p["username"], p["body"]])
    with open(os.path.join(args.out, "forum_posts.csv"), "w", encoding="utf-8", newline="") as f:
        f.write(buf.getvalue())

    with open(os.path.join(args.out, "annotations.jsonl"), "w", encoding="utf-8") as f:
        for r in make_annotations(rng, posts):
            f.write(json.dumps(r, sort_keys=True, ensure_ascii=False) + "\n")

    with open(os.path.join(args.out, "two_cluster.jsonl"), "w", encoding="utf-8") as f:
        for r in make_two_cluster(rng, 50):
            f.write(json.dumps(r, sort_keys=True, ensure_ascii=False) + "\n")

    config = {
        "workdir": "work",
        "ingest": {"input": "forum_posts.csv", "format": "csv"},
        "preprocess": {"min_df": 2},
        "dataset": {"annotations": "annotations.jsonl"},
        "reader": {"kind": "oracle"},
    }
    with open(os.path.join(args.out, "pipeline.json"), "w", encoding="utf-8") as f:
        f.write(json.dumps(config, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
