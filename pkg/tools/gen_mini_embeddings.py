"""Regenerate data/mini_glove_50d.txt, the tiny word-vector fixture.

Vectors are synthetic but theme-correlated: tokens in the same theme share
a base direction plus per-token noise, so cosine similarity behaves sanely
in tests and demos. Deterministic (fixed seed); run from the repo root:

    python tools/gen_mini_embeddings.py
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

DIM = 50
SEED = 20210901

THEMES: dict[str, list[str]] = {
    "vaccines": [
        "vaccine", "vaccines", "vaccination", "vaccinated", "vax", "pfizer",
        "moderna", "astrazeneca", "biontech", "novavax", "sputnik", "sinovac",
        "covaxin", "covidshield", "mrna", "jnj", "johnson", "oxford", "booster",
        "boosters", "variants", "variant", "immunity", "immune", "antibodies",
        "antibody", "efficacy", "effective", "effectiveness", "protection",
        "protects", "protect", "protected",
    ],
    "shots": [
        "shot", "shots", "dose", "doses", "jab", "jabs", "injection",
        "injections", "needle", "needles", "syringe", "arm", "appointment",
        "appointments", "clinic", "pharmacy", "nurse", "inoculation",
    ],
    "politics": [
        "politics", "political", "government", "congress", "senate", "policy",
        "election", "democrats", "republicans", "democrat", "republican",
        "biden", "trump", "administration", "governor", "mandate", "mandates",
        "mandatory", "freedom", "law", "lawmakers", "white", "house", "potus",
        "legislation", "politician", "politicians",
    ],
    "health": [
        "covid", "coronavirus", "virus", "disease", "pandemic", "outbreak",
        "lockdown", "hospital", "doctor", "doctors", "health", "healthy",
        "patients", "symptoms", "symptom", "fever", "headache", "fatigue",
        "reaction", "reactions", "myocarditis", "sick", "illness", "infection",
        "infections", "cases", "recovery", "recover", "recovered",
    ],
    "science": [
        "data", "facts", "fact", "statistics", "numbers", "study", "studies",
        "evidence", "research", "science", "scientists", "trial", "trials",
        "phase", "placebo", "participants", "volunteers", "clinical",
        "results", "findings", "analysis", "report", "reported", "percent",
    ],
    "myths": [
        "myth", "myths", "hoax", "conspiracy", "microchip", "microchips",
        "5g", "magnetic", "infertility", "sterile", "dna", "rumor", "rumors",
        "falsehood", "lie", "lies", "fake", "fraud", "scam", "plandemic",
    ],
    "approval": [
        "approval", "approved", "authorization", "authorized", "emergency",
        "fda", "cdc", "who", "regulator", "regulators", "licensure",
        "clearance", "greenlight", "sanction", "endorsement",
    ],
    "logistics": [
        "availability", "available", "supply", "shortage", "distribution",
        "rollout", "eligibility", "eligible", "warp", "speed", "operation",
        "doses", "shipment", "shipments", "delivery", "stock", "sites",
    ],
    "positive": [
        "good", "great", "best", "safe", "safely", "safer", "safety",
        "thankful", "grateful", "hope", "hopeful", "happy", "glad", "relief",
        "relieved", "success", "successful", "win", "wonderful", "excellent",
        "amazing", "trust", "trusted", "love", "proud", "blessed",
    ],
    "negative": [
        "bad", "worst", "worse", "terrible", "horrible", "awful", "dangerous",
        "danger", "deadly", "death", "deaths", "die", "died", "dying", "kill",
        "kills", "killed", "harm", "harmful", "toxic", "poison", "scary",
        "scared", "fear", "panic", "worry", "worried", "risk", "risky",
        "unsafe", "useless", "misleading",
    ],
    "places": [
        "usa", "america", "american", "americans", "uk", "india", "china",
        "canada", "australia", "texas", "florida", "california", "york",
        "london", "europe", "ohio", "state", "states", "country", "world",
    ],
    "common": [
        "the", "a", "an", "is", "are", "was", "were", "be", "been", "有",
        "i", "you", "we", "they", "he", "she", "it", "my", "your", "our",
        "get", "got", "getting", "go", "going", "went", "take", "took",
        "taking", "make", "made", "say", "said", "says", "see", "know",
        "think", "want", "need", "today", "tomorrow", "yesterday", "now",
        "people", "person", "everyone", "anyone", "time", "day", "week",
        "month", "year", "news", "read", "watch", "share", "please", "just",
        "really", "very", "not", "no", "never", "more", "most", "all",
        "some", "many", "much", "still", "also", "about", "after", "before",
        "and", "but", "for", "with", "from", "this", "that", "what", "when",
        "how", "why", "will", "would", "can", "could", "should", "do",
        "does", "did", "done", "million", "millions", "billion", "billions",
    ],
}


def main() -> None:
    rng = np.random.default_rng(SEED)
    bases = {theme: rng.normal(size=DIM) for theme in THEMES}
    out_path = Path(__file__).resolve().parents[1] / "src" / "misinfo_triage" / "data" / "mini_glove_50d.txt"

    lines = []
    seen: set[str] = set()
    for theme, tokens in THEMES.items():
        base = bases[theme]
        for token in tokens:
            if token in seen or not token.isascii():
                continue
            seen.add(token)
            vec = 2.0 * base + rng.normal(size=DIM)
            lines.append(token + " " + " ".join(f"{x:.5f}" for x in vec))
    out_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {len(lines)} vectors (d={DIM}) to {out_path}")


if __name__ == "__main__":
    main()
