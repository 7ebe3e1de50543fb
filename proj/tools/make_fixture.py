#!/usr/bin/env python3
"""Regenerates the bundled desk-scale fixture under data/fixture/.

Ten fictional countries with five passages each (50 passages), four tasks,
seed instances, a one-hop entity graph, a GTI-format benchmark and a
held-out retrieval evaluation set. Output is deterministic.
"""
import json
import random
import sys
from pathlib import Path

COUNTRIES = [
    # name, capital, river, mountain, founder, year, currency, export, festival, neighbor
    ("Zorlandia", "Velmora", "Arin", "Keldar", "Tomas Brenn", 1412, "zorin", "copper", "Lantern", "Quessia"),
    ("Quessia", "Dunmarch", "Osk", "Ferrow", "Ilsa Varn", 1520, "quel", "timber", "Harvest", "Maridane"),
    ("Maridane", "Porthaven", "Selle", "Ostrun", "Corwin Hale", 1288, "marid", "salt", "Tide", "Belgrove"),
    ("Belgrove", "Ashcombe", "Temmel", "Grayspire", "Edda Lorne", 1603, "bel", "wool", "Ember", "Tarsk"),
    ("Tarsk", "Skarholm", "Vindel", "Hrolf", "Sigrun Aal", 1177, "tark", "iron", "Frost", "Ondoria"),
    ("Ondoria", "Calvessa", "Lumen", "Serrat", "Mateo Quill", 1455, "ondo", "olive", "Bloom", "Pellmark"),
    ("Pellmark", "Grunwald", "Eiser", "Hochtal", "Anselm Roth", 1349, "pell", "coal", "Bell", "Varaska"),
    ("Varaska", "Iskarra", "Dremm", "Volkov", "Nadia Irsk", 1701, "vara", "amber", "Kite", "Sundmere"),
    ("Sundmere", "Brightwater", "Kell", "Aldmoor", "Rowan Pike", 1533, "sund", "barley", "Lantern Moon", "Elthoria"),
    ("Elthoria", "Miravel", "Quin", "Sorrowpeak", "Lysa Fenn", 1398, "elth", "silk", "Star", "Zorlandia"),
]

TASKS = [
    {"task_id": "nq",
     "task_instruction": "Answer the question based on the given passages.",
     "retrieval_instruction": "Retrieve passages to answer the question.",
     "example_input": "What is the capital of Arvania?",
     "example_output": "Ostermark"},
    {"task_id": "hotpotqa",
     "task_instruction": "Answer the question based on the given passages. You may need to refer to multiple passages.",
     "retrieval_instruction": "Find passages that provide useful information to answer this question.",
     "example_input": "Which river flows through the capital of the country founded by Elin Moor?",
     "example_output": "Vesk"},
    {"task_id": "fever",
     "task_instruction": "Verify whether the claim is correct based on the given passages. If it is correct, output \"SUPPORTS\", if it is wrong, output \"REFUTES\".",
     "retrieval_instruction": "Retrieve passages to verify this claim.",
     "example_input": "Arvania uses the arv as its currency.",
     "example_output": "SUPPORTS"},
    {"task_id": "zsre",
     "task_instruction": "Given an entity and an attribute (or relationship), fill in the specific value of the attribute based on the following passages. The entity and the attribute are separated by \"[SEP]\".",
     "retrieval_instruction": "Find passages related to the entities.",
     "example_input": "Arvania [SEP] founder",
     "example_output": "Elin Moor"},
]


def passages_for(c):
    name, capital, river, mountain, founder, year, currency, export, festival, neighbor = c
    return [
        (f"{name}-geo",
         f"{name} is a small country in the northern highlands. Its capital city is {capital}, "
         f"which lies on the banks of the {river} River. The highest point of the country is "
         f"Mount {mountain}, where snow remains for most of the year and shepherds graze their flocks."),
        (f"{name}-history",
         f"{name} was founded in {year} by {founder}, who united the scattered valley clans under a "
         f"single charter. Chroniclers describe {founder} as a patient negotiator. The charter still "
         f"hangs in the old assembly hall and is read aloud once every decade."),
        (f"{name}-economy",
         f"The economy of {name} depends heavily on {export} exports, which leave through mountain "
         f"passes and river barges. The national currency is the {currency}, minted in small copper "
         f"and silver coins. Merchants keep careful ledgers of every shipment."),
        (f"{name}-culture",
         f"Every spring the people of {name} celebrate the {festival} Festival with music, long "
         f"processions and shared meals in the town squares. Visitors travel for days to watch the "
         f"closing procession, and families prepare their costumes for months."),
        (f"{name}-relations",
         f"{name} shares a long border with {neighbor}. Trade agreements between the two neighbors "
         f"were renewed many times, and travelers cross the border at a dozen mountain stations. "
         f"Diplomats meet each autumn to settle disputes over grazing rights."),
    ]


def main(out_dir: Path):
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = random.Random(7)
    passages = []
    by_country = {}
    for c in COUNTRIES:
        ps = passages_for(c)
        by_country[c[0]] = ps
        passages.extend(ps)
    assert len(passages) == 50

    with open(out_dir / "passages.jsonl", "w") as f:
        for pid, text in passages:
            f.write(json.dumps({"id": pid, "text": text, "source": "corpus"}) + "\n")
    with open(out_dir / "tasks.jsonl", "w") as f:
        for t in TASKS:
            f.write(json.dumps(t) + "\n")

    seeds = []
    for name, capital, river, mountain, founder, year, currency, export, festival, neighbor in COUNTRIES:
        seeds.append({"task_id": "nq", "input": f"What is the capital of {name}?", "ground_truth": capital})
        seeds.append({"task_id": "fever", "input": f"{name} uses the {currency} as its currency.", "ground_truth": "SUPPORTS"})
        seeds.append({"task_id": "zsre", "input": f"{name} [SEP] founder", "ground_truth": founder})
        seeds.append({"task_id": "nq", "input": f"Which river flows through {capital}?", "ground_truth": river})
        seeds.append({"task_id": "hotpotqa", "input": f"Which festival is celebrated in the country whose capital is {capital}?", "ground_truth": festival})
        seeds.append({"task_id": "fever", "input": f"{name} shares a border with {neighbor}.", "ground_truth": "SUPPORTS"})
        seeds.append({"task_id": "zsre", "input": f"{name} [SEP] highest mountain", "ground_truth": f"Mount {mountain}"})
        seeds.append({"task_id": "hotpotqa", "input": f"What is the main export of the country founded by {founder}?", "ground_truth": export})
    with open(out_dir / "seeds.jsonl", "w") as f:
        for s in seeds:
            f.write(json.dumps(s) + "\n")

    graph = {}
    for name, capital, river, mountain, founder, year, currency, export, festival, neighbor in COUNTRIES:
        graph[name] = [capital, neighbor, founder, f"{river} River"]
        graph[capital] = [name]
        graph[founder] = [name]
    with open(out_dir / "wikidata_fixture.json", "w") as f:
        json.dump(graph, f, indent=1, sort_keys=True)
        f.write("\n")

    names = [c[0] for c in COUNTRIES]

    def candidates(name, useful_id, count=10):
        own = [p for p in by_country[name]]
        others = [p for n in names if n != name for p in by_country[n]]
        rng.shuffle(others)
        pool = own + others[: count - len(own)]
        rng.shuffle(pool)
        return pool, [1.0 if pid == useful_id else 0.0 for pid, _ in pool]

    # GTI-format benchmark: two questions per country, one useful passage each.
    gti = []
    for name, capital, river, mountain, founder, year, currency, export, festival, neighbor in COUNTRIES:
        for q, a, pid in [
            (f"Who founded {name}?", founder.split()[0], f"{name}-history"),
            (f"What do people in {name} pay with?", currency, f"{name}-economy"),
        ]:
            pool, gains = candidates(name, pid)
            gti.append({"query": q, "ground_truth": a,
                        "passages": [{"id": i, "text": t} for i, t in pool], "gains": gains})
    assert len(gti) == 20
    with open(out_dir / "gti.jsonl", "w") as f:
        for g in gti:
            f.write(json.dumps(g) + "\n")

    # Held-out retrieval queries, phrased unlike any seed.
    instr = TASKS[0]["retrieval_instruction"]
    evals = []
    for name, capital, river, mountain, founder, year, currency, export, festival, neighbor in COUNTRIES:
        for q, pid in [
            (f"Which festival do the people of {name} celebrate each spring?", f"{name}-culture"),
            (f"What goods does {name} export?", f"{name}-economy"),
            (f"Which country shares a border with {name}?", f"{name}-relations"),
            (f"What is the highest mountain in {name}?", f"{name}-geo"),
            (f"In which year was {name} founded?", f"{name}-history"),
        ]:
            pool, gains = candidates(name, pid)
            evals.append({"query": f"{instr} {q}", "passages": [{"id": i, "text": t} for i, t in pool],
                          "gains": gains})
    with open(out_dir / "retrieval_eval.jsonl", "w") as f:
        for e in evals:
            f.write(json.dumps(e) + "\n")


if __name__ == "__main__":
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data" / "fixture")
