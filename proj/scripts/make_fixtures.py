#!/usr/bin/env python3
"""Regenerates the bundled fixture corpus under fixtures/.

Everything is deterministic: series come from closed-form formulas, the
embedding vectors from seeded per-token generators. Re-running the script
reproduces the committed files byte for byte.
"""

import json
import math
import os
import random
import struct

HERE = os.path.dirname(os.path.abspath(__file__))
FIX = os.path.join(HERE, "..", "fixtures")

MATERIALS = ["M1", "M2", "M3", "M4", "M5"]
MONTHS = [(y, m) for y in (2017, 2018, 2019) for m in range(1, 13)]  # 36 months
IND_MONTHS = [(y, m) for y in (2016, 2017, 2018, 2019) for m in range(1, 13)]


def ym(y, m):
    return f"{y:04d}-{m:02d}"


def month_index(y, m):
    return (y - 2016) * 12 + (m - 1)


def gdp_at(y, m):
    k = month_index(y, m)
    return round(100.0 + 0.30 * k + 2.0 * math.sin(2 * math.pi * k / 24.0), 3)


def pmi_at(y, m):
    k = month_index(y, m)
    return round(52.0 + 4.0 * math.sin(2 * math.pi * k / 9.0 + 1.0), 3)


def ue_at(y, m):
    k = month_index(y, m)
    return round(7.0 - 0.02 * k + 0.5 * math.sin(2 * math.pi * k / 12.0 + 2.0), 3)


def working_days(y, m):
    return 20 + (month_index(y, m) * 7 + 3) % 4


def demand_at(mat_idx, y, m):
    k = month_index(y, m)
    base = 150.0 + 60.0 * mat_idx
    seasonal = (18.0 + 4.0 * mat_idx) * math.sin(2 * math.pi * (k + 2 * mat_idx) / 12.0)
    trend = (0.8 + 0.25 * mat_idx) * (k - 12)
    coupling = 6.0 * (gdp_at(y, m) - 100.0) / 10.0
    wobble = 10.0 * math.sin(1.7 * k + mat_idx)  # deterministic stand-in for noise
    return max(0.0, round(base + seasonal + trend + coupling + wobble, 1))


def plan_at(mat_idx, y, m):
    k = month_index(y, m)
    err = 1.0 + 0.06 * math.sin(2.3 * k + mat_idx)
    return max(1.0, round(demand_at(mat_idx, y, m) * err, 1))


def write_series():
    with open(os.path.join(FIX, "demand.csv"), "w") as f:
        f.write("material_id,month,quantity\n")
        for i, mat in enumerate(MATERIALS):
            for y, m in MONTHS:
                f.write(f"{mat},{ym(y, m)},{demand_at(i, y, m)}\n")
    with open(os.path.join(FIX, "plan.csv"), "w") as f:
        f.write("material_id,month,planned_qty\n")
        for i, mat in enumerate(MATERIALS):
            for y, m in MONTHS:
                f.write(f"{mat},{ym(y, m)},{plan_at(i, y, m)}\n")
    with open(os.path.join(FIX, "indicators.csv"), "w") as f:
        f.write("indicator,region,month,value\n")
        for y, m in IND_MONTHS:
            f.write(f"GDP,EU,{ym(y, m)},{gdp_at(y, m)}\n")
        for y, m in IND_MONTHS:
            f.write(f"PMI,EU,{ym(y, m)},{pmi_at(y, m)}\n")
        for y, m in IND_MONTHS:
            f.write(f"UE,EU,{ym(y, m)},{ue_at(y, m)}\n")
    with open(os.path.join(FIX, "working_days.csv"), "w") as f:
        f.write("month,count\n")
        for y, m in MONTHS:
            f.write(f"{ym(y, m)},{working_days(y, m)}\n")


EVENT_THEMES = [
    # (title template, body template, source). Most bodies carry an
    # automotive phrase so that every feature's query group can match.
    ("New car sales climb in {my}",
     "Dealers report that new car sales and overall car demand strengthened. "
     "The automotive industry recorded higher vehicle sales, and analysts see "
     "steady demand for popular models across the market.",
     "Motor Wire"),
    ("Vehicle sales steady despite shifting prices",
     "Vehicle sales held firm while dealers adjusted prices. Car demand from "
     "fleet buyers kept factories busy and supported production plans across "
     "the automotive industry.",
     "Auto Daily"),
    ("Global economic outlook brightens",
     "A fresh economic forecast lifted the global economic outlook as GDP "
     "growth beat expectations. Economists said stronger output supports car "
     "demand and consumer spending across the economy.",
     "Econ Review"),
    ("GDP growth revised upward",
     "Statisticians revised GDP growth upward, improving the economic "
     "forecast for exporters. The report noted resilient vehicle sales and "
     "firm demand in the automotive industry.",
     "Econ Review"),
    ("Unemployment rate falls to a new low",
     "The unemployment rate dropped as employment growth continued. The "
     "unemployment report counted more people in work, and economists linked "
     "the job gains to steady car demand.",
     "Labour Journal"),
    ("Employment growth beats expectations",
     "Employment growth surprised analysts and long-term unemployment "
     "declined. Workers returned to factories, and the report flagged rising "
     "vehicle sales as hiring strengthened.",
     "Labour Journal"),
    ("Purchase managers' index signals expansion",
     "The purchase managers' index rose as factory orders expanded. Managers "
     "reported stronger production and steady car demand, with suppliers "
     "lifting output across the automotive industry.",
     "Industry Pulse"),
    ("Factory orders lift manufacturing mood",
     "The purchase managers' index stayed above the expansion mark. Plants "
     "added shifts to meet vehicle sales, and the survey pointed to firm "
     "demand for parts and steel.",
     "Industry Pulse"),
]


def write_events():
    months = [(y, m) for y in (2017, 2018, 2019) for m in range(1, 13)]
    months = [x for x in months if x >= (2017, 7)]
    events = []
    counter = 1
    for y, m in months:
        for slot in range(2):
            theme = EVENT_THEMES[(month_index(y, m) * 2 + slot) % len(EVENT_THEMES)]
            day = 8 + ((month_index(y, m) * 5 + slot * 9) % 14)  # days 8..21
            title = theme[0].format(my=f"{ym(y, m)}")
            events.append({
                "id": f"E{counter:03d}",
                "date": f"{ym(y, m)}-{day:02d}",
                "title": title,
                "body": theme[1],
                "source": theme[2],
            })
            counter += 1
    with open(os.path.join(FIX, "events.jsonl"), "w") as f:
        for e in events:
            f.write(json.dumps(e, sort_keys=True) + "\n")
    return events


DATASETS = [
    ("D01", "Monthly vehicle registrations", "New vehicle registrations by month covering car and van sales across member states.", "transport-agency"),
    ("D02", "Car demand survey", "Quarterly survey of car demand, dealer inventories and vehicle sales expectations.", "auto-association"),
    ("D03", "GDP quarterly statistics", "Gross domestic product growth, output and expenditure components for the economy.", "statistics-office"),
    ("D04", "Economic outlook projections", "Projections underlying the economic forecast, including GDP growth and consumer spending.", "economic-bureau"),
    ("D05", "Unemployment rate by region", "Unemployment rate, employment growth and long-term unemployment by region and month.", "labour-office"),
    ("D06", "Employment and wages", "Employment, wages and workers by sector from the labour force survey.", "labour-office"),
    ("D07", "Manufacturing PMI history", "Purchase managers' index history with factory orders, output and supplier deliveries.", "industry-panel"),
    ("D08", "Industrial production index", "Industrial production and factory output by sector, seasonally adjusted.", "statistics-office"),
    ("D09", "Steel production figures", "Steel production, shipments and inventories reported by plants.", "industry-panel"),
    ("D10", "Energy prices for industry", "Energy and fuel prices paid by industrial consumers.", "energy-agency"),
    ("D11", "Road traffic volumes", "Road traffic volumes and vehicle counts from monitoring stations.", "transport-agency"),
    ("D12", "Ozone pollution measurements", "Ozone and air pollution measurements from monitoring stations, with emission context.", "environment-agency"),
    ("D13", "Consumer confidence tracker", "Consumer confidence, spending intentions and savings expectations.", "economic-bureau"),
    ("D14", "Retail trade turnover", "Retail trade turnover and consumer spending by store category.", "statistics-office"),
    ("D15", "Export and import flows", "Export and import flows of goods, including engine and vehicle parts.", "customs-office"),
    ("D16", "Battery and charging statistics", "Battery production and charging station counts for electric vehicles.", "energy-agency"),
    ("D17", "Supplier delivery times", "Supplier delivery times and parts availability reported by factories.", "industry-panel"),
    ("D18", "Producer price index", "Producer prices for manufactured goods, including cars and parts.", "statistics-office"),
    ("D19", "Job vacancies by sector", "Job vacancies and hiring intentions by sector and quarter.", "labour-office"),
    ("D20", "Construction output", "Construction output, orders and building permits by month.", "statistics-office"),
    ("D21", "Air quality annual report", "Air quality, emission trends and pollution by station and pollutant.", "environment-agency"),
    ("D22", "Fleet fuel consumption", "Fuel consumption of vehicle fleets with engine category breakdowns.", "transport-agency"),
    ("D23", "Wage growth statistics", "Wage growth by sector with employment context from payroll data.", "labour-office"),
    ("D24", "Model launch calendar", "Car model launches with market segment and production plant details.", "auto-association"),
]


def write_datasets():
    with open(os.path.join(FIX, "datasets.jsonl"), "w") as f:
        for did, title, desc, pub in DATASETS:
            f.write(json.dumps({
                "id": did, "title": title, "description": desc,
                "publisher": pub, "uri": f"https://data.example.org/{did.lower()}",
            }, sort_keys=True) + "\n")


STOPWORDS = """a an the and or but as at by for from in into of on to with is are was were be been
being has have had it its this that these those their they them he she his her we our you your i
not no so if then than too very will would can could may might do does did up down out over under
again more most some such only own same just now also after before during while about against
between across per new fresh the a said see kept held beat""".split()

NOUN_LEXICON = """sale car vehicle demand industry dealer price market production factory economy
growth gdp outlook forecast unemployment rate employment job worker record index manager purchase
expansion order export import plant model supplier supply part company quarter year month report
survey consumer confidence spending wage people work number steel energy fuel engine battery
charging registration traffic road pollution ozone emission air station dataset statistic figure
sector output inventory shipment analyst expectation fleet buyer shift gain hiring economist
statistician van member state delivery time saving intention turnover store category flow good
vacancy permit building construction trend pollutant payroll context breakdown segment launch
calendar detail count""".split()


def collect_vocabulary(events):
    import re
    vocab = set()

    def add_text(text):
        for token in re.findall(r"[A-Za-z]+", text.lower()):
            vocab.add(token)

    for e in events:
        add_text(e["title"])
        add_text(e["body"])
    for _, title, desc, _ in DATASETS:
        add_text(title)
        add_text(desc)
    for phrase_list in FEATURE_KEYWORDS.values():
        for phrase in phrase_list:
            add_text(phrase)
    vocab.update(NOUN_LEXICON)
    vocab -= set(STOPWORDS)
    return sorted(vocab)


TOPIC_ANCHORS = {
    "auto": ["car", "vehicle", "automotive", "sale", "sales", "dealer", "demand", "registration",
             "fleet", "model", "van", "engine", "traffic", "road"],
    "economy": ["gdp", "economic", "economy", "outlook", "forecast", "growth", "consumer",
                "spending", "confidence", "projection", "global", "turnover"],
    "labour": ["unemployment", "employment", "job", "worker", "wage", "labour", "hiring",
               "vacancy", "payroll", "people", "work"],
    "industry": ["pmi", "index", "manager", "managers", "purchase", "factory", "production",
                 "output", "plant", "order", "supplier", "steel", "manufacturing", "industrial"],
}

DIM = 16


def token_vector(token):
    anchor = None
    for topic, members in TOPIC_ANCHORS.items():
        if token in members:
            anchor = topic
            break
    rng = random.Random("tok:" + token)
    vec = [rng.gauss(0.0, 1.0) for _ in range(DIM)]
    if anchor is not None:
        arng = random.Random("topic:" + anchor)
        base = [arng.gauss(0.0, 1.0) for _ in range(DIM)]
        vec = [3.0 * b + 0.4 * v for b, v in zip(base, vec)]
    return vec


def write_embeddings(vocab):
    with open(os.path.join(FIX, "embeddings.bin"), "wb") as f:
        f.write(f"{len(vocab)} {DIM}\n".encode("ascii"))
        for token in vocab:
            f.write(token.encode("ascii") + b" ")
            for v in token_vector(token):
                f.write(struct.pack("<f", v))
            f.write(b"\n")


FEATURE_KEYWORDS = {
    "A": ["car sales demand", "new car sales", "vehicle sales", "car demand", "automotive industry"],
    "D": ["global GDP projection", "global economic outlook", "economic forecast"],
    "J": ["unemployment rate", "unemployment numbers", "unemployment report", "employment growth",
          "long-term unemployment"],
    "K": ["purchase managers' index"],
}


def write_feature_specs():
    feats = [
        {"id": "A", "actionable": True, "source": "plan", "lags": [1], "aggregation": "raw",
         "keywords": FEATURE_KEYWORDS["A"], "abstraction_leaf": "CPS"},
        {"id": "B", "actionable": True, "source": "plan", "lags": [12], "aggregation": "raw",
         "keywords_same_as": "A", "abstraction_leaf": "PPS"},
        {"id": "C", "actionable": True, "source": "plan_demand_ratio", "lags": [12],
         "aggregation": "raw", "keywords_same_as": "A", "abstraction_leaf": "PPS"},
        {"id": "D", "actionable": True, "source": "gdp_delta", "lags": [3], "aggregation": "raw",
         "keywords": FEATURE_KEYWORDS["D"], "keywords_extra_from": "A", "abstraction_leaf": "GDP"},
        {"id": "E", "actionable": False, "source": "demand", "lags": [1], "aggregation": "raw",
         "keywords_same_as": "A", "abstraction_leaf": "RPD"},
        {"id": "F", "actionable": False, "source": "demand", "lags": [12],
         "aggregation": "min-max-scaled", "keywords_same_as": "A", "abstraction_leaf": "SAPD"},
        {"id": "G", "actionable": False, "source": "demand", "lags": [1],
         "aggregation": "working-day-average", "keywords_same_as": "A", "abstraction_leaf": "WDAPD"},
        {"id": "H", "actionable": False, "source": "demand", "lags": [12, 24],
         "aggregation": "past-weighted-average", "weights": [0.7, 0.3], "keywords_same_as": "A",
         "abstraction_leaf": "WAPD"},
        {"id": "I", "actionable": False, "source": "gdp", "lags": [3], "aggregation": "raw",
         "keywords_same_as": "D", "abstraction_leaf": "GDP"},
        {"id": "J", "actionable": False, "source": "ue", "lags": [3], "aggregation": "raw",
         "keywords": FEATURE_KEYWORDS["J"], "keywords_extra_from": "A", "abstraction_leaf": "UE"},
        {"id": "K", "actionable": False, "source": "pmi", "lags": [3], "aggregation": "raw",
         "keywords": FEATURE_KEYWORDS["K"], "keywords_extra_from": "A", "abstraction_leaf": "PMI"},
        {"id": "L", "actionable": False, "source": "gdp", "lags": [15], "aggregation": "raw",
         "keywords_same_as": "D", "abstraction_leaf": "GDP"},
        {"id": "M", "actionable": False, "source": "ue", "lags": [12], "aggregation": "raw",
         "keywords_same_as": "J", "abstraction_leaf": "UE"},
    ]
    with open(os.path.join(FIX, "feature_specs.json"), "w") as f:
        json.dump({"features": feats}, f, indent=2)
        f.write("\n")


def write_abstraction():
    concepts = [
        {"name": "PS", "long_name": "Planned Sales"},
        {"name": "PPS", "long_name": "Past Planned Sales", "parent": "PS"},
        {"name": "CPS", "long_name": "Current Planned Sales", "parent": "PS"},
        {"name": "PD", "long_name": "Past Demand"},
        {"name": "APD", "long_name": "Adjusted Past Demand", "parent": "PD"},
        {"name": "RPD", "long_name": "Raw Past Demand", "parent": "PD"},
        {"name": "SAPD", "long_name": "Scaled Adjusted Past Demand", "parent": "APD"},
        {"name": "WAPD", "long_name": "Weighted Adjusted Past Demand", "parent": "APD"},
        {"name": "WDAPD", "long_name": "Working Day Adjusted Past Demand", "parent": "APD"},
        {"name": "EC", "long_name": "Economic Context"},
        {"name": "PMI", "long_name": "Purchasing Managers' Index", "parent": "EC"},
        {"name": "GDP", "long_name": "Gross Domestic Product", "parent": "EC"},
        {"name": "UE", "long_name": "Unemployment Rate", "parent": "EC"},
    ]
    with open(os.path.join(FIX, "abstraction.json"), "w") as f:
        json.dump({"concepts": concepts}, f, indent=2)
        f.write("\n")


def write_mapping_rules():
    rules = [
        {"name": "product", "source": "demand", "label": "Product",
         "properties": {"material": "material"}},
        {"name": "abstraction-root", "source": "abstraction", "selector": {"has_parent": "no"},
         "label": "AttributeAbstraction",
         "properties": {"name": "name", "long_name": "long_name"}},
        {"name": "abstraction-child", "source": "abstraction", "selector": {"has_parent": "yes"},
         "label": "AttributeAbstraction",
         "properties": {"name": "name", "long_name": "long_name"},
         "edges": [{"relation": "parentConcept", "other_label": "AttributeAbstraction",
                    "other_key": {"name": "parent"}}]},
        {"name": "attribute", "source": "feature_map", "label": "Attribute",
         "properties": {"feature_id": "feature_id", "actionable": "actionable"},
         "edges": [{"relation": "abstractedBy", "other_label": "AttributeAbstraction",
                    "other_key": {"name": "leaf"}}]},
        {"name": "event-provenance", "source": "event", "label": "InformationProvenance",
         "properties": {"source_name": "source_name"}},
        {"name": "event", "source": "event", "label": "MediaReportedEvent",
         "properties": {"event_id": "event_id", "date": "date", "title": "title",
                        "body": "body", "source": "source_name"},
         "event_time_field": "date",
         "edges": [{"relation": "fromProvenance", "other_label": "InformationProvenance",
                    "other_key": {"source_name": "source_name"}}]},
        {"name": "dataset-provenance", "source": "dataset", "label": "InformationProvenance",
         "properties": {"source_name": "source_name"}},
        {"name": "dataset", "source": "dataset", "label": "ExternalDatasetMetadata",
         "properties": {"dataset_id": "dataset_id", "title": "title",
                        "description": "description", "publisher": "publisher", "uri": "uri"},
         "edges": [{"relation": "fromProvenance", "other_label": "InformationProvenance",
                    "other_key": {"source_name": "source_name"}}]},
    ]
    with open(os.path.join(FIX, "mapping_rules.json"), "w") as f:
        json.dump({"rules": rules}, f, indent=2)
        f.write("\n")


def write_pipeline_config():
    config = {
        "inputs": {
            "demand": "demand.csv",
            "indicators": "indicators.csv",
            "plan": "plan.csv",
            "working_days": "working_days.csv",
            "events": "events.jsonl",
            "datasets": "datasets.jsonl",
            "embeddings": "embeddings.bin",
            "stopwords": "stopwords.txt",
            "noun_lexicon": "noun_lexicon.txt",
            "mapping_rules": "mapping_rules.json",
            "feature_specs": "feature_specs.json",
            "abstraction": "abstraction.json",
        },
        "materials": [],
        "explain_months": 3,
        "region": "EU",
        "forecast": {
            "grid": [{"C": 1.0, "epsilon": 0.1}, {"C": 100.0, "epsilon": 0.1}],
            "outer_months": 8,
            "min_train": 4,
            "inner_months": 3,
            "iterations": 600,
            "learning_rate": 0.1,
            "q_low": 0.1,
            "q_high": 0.9,
        },
        "analyzer": {"n_samples": 512, "sigma": 0.0, "top_k": 4, "seed": 7, "lambda": 1e-6},
        "media": {"closeness_days": 15, "max_events_per_query": 50, "event_pool": 10,
                  "keyword_pool": 10, "display_events": 3, "display_keywords": 3},
        "recommender": {"top_n": 10, "dataset_pool": 10, "display_datasets": 1, "max_candidates": 100},
        "min_abstraction_level": 1,
        "kg_retention_days": 1460,
        "seed": 20190601,
        "parallel": True,
    }
    with open(os.path.join(FIX, "pipeline.json"), "w") as f:
        json.dump(config, f, indent=2)
        f.write("\n")


def write_token_files():
    with open(os.path.join(FIX, "stopwords.txt"), "w") as f:
        for w in sorted(set(STOPWORDS)):
            f.write(w + "\n")
    with open(os.path.join(FIX, "noun_lexicon.txt"), "w") as f:
        for w in sorted(set(NOUN_LEXICON)):
            f.write(w + "\n")


def write_annotations_sample():
    rows = [
        ("X1", "event", 1, "E1", 1), ("X1", "event", 2, "E2", 0), ("X1", "event", 3, "E3", 1),
        ("X2", "event", 1, "E1", 1), ("X2", "event", 2, "E4", 1), ("X2", "event", 3, "E5", 0),
        ("X1", "keyword", 1, "sale", 1), ("X1", "keyword", 2, "car", 1), ("X1", "keyword", 3, "gdp", 0),
        ("X2", "keyword", 1, "sale", 0), ("X2", "keyword", 2, "rate", 1), ("X2", "keyword", 3, "index", 1),
        ("X1", "dataset", 1, "D1", 1), ("X2", "dataset", 1, "D1", 0),
    ]
    with open(os.path.join(FIX, "annotations_sample.csv"), "w") as f:
        f.write("explanation_id,item_kind,rank,item_id,relevant\n")
        for row in rows:
            f.write(",".join(str(x) for x in row) + "\n")


def main():
    os.makedirs(FIX, exist_ok=True)
    write_series()
    events = write_events()
    write_datasets()
    write_token_files()
    write_feature_specs()
    write_abstraction()
    write_mapping_rules()
    write_pipeline_config()
    write_annotations_sample()
    vocab = collect_vocabulary(events)
    write_embeddings(vocab)
    print(f"wrote fixtures: {len(events)} events, {len(DATASETS)} datasets, vocab {len(vocab)}")


if __name__ == "__main__":
    main()
