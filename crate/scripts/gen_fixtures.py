#!/usr/bin/env python3
"""Regenerates crates/cli/tests/fixtures: a synthetic 500-row payments table
shaped like the Dollars for Docs product_payments extract, a state-level
census-style ground truth, and the manual-input / override files.

Output is deterministic; rerunning must not change the committed files.
"""
import csv
import datetime
import json
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "crates" / "cli" / "tests" / "fixtures"
ROWS = 500

COLUMNS = [
    "id",
    "applicable_manufacturer_or_applicable_gpo_making_payment_id",
    "date_of_payment",
    "general_transaction_id",
    "program_year",
    "product_name",
    "original_product_name",
    "product_ndc",
    "product_is_drug",
    "payment_has_many",
    "teaching_hospital_id",
    "physician_profile_id",
    "recipient_state",
    "applicable_manufacturer_or_applicable_gpo_making_payment_name",
    "teaching_hospital_ccn",
    "product_slug",
    "total_amount_of_payment_usdollars",
    "number_of_payments_included_in_total_amount",
]

# Missing cells per column, as in the prototype label's statistics.
MISSING = {
    "id": 13,
    "date_of_payment": 27,
    "general_transaction_id": 34,
    "program_year": 5,
    "product_name": 16,
    "product_ndc": 25,
    "product_is_drug": 8,
    "payment_has_many": 29,
    "teaching_hospital_id": 36,
    "physician_profile_id": 32,
    "applicable_manufacturer_or_applicable_gpo_making_payment_name": 35,
    "teaching_hospital_ccn": 19,
    "product_slug": 41,
    "total_amount_of_payment_usdollars": 47,
    "number_of_payments_included_in_total_amount": 24,
}

# (product, manufacturer id, manufacturer, ndc, rows); Xarelto dominates and
# Aciphex appears once.
PRODUCTS = [
    ("Xarelto", 100000000232, "Janssen Pharmaceuticals, Inc", 5045857810, 212),
    ("Eliquis", 100000000286, "Bristol-Myers Squibb Company", 3089421, 62),
    ("Invokana", 100000000232, "Janssen Pharmaceuticals, Inc", 5045814030, 48),
    ("Brilinta", 100000000195, "AstraZeneca Pharmaceuticals LP", 186077760, 37),
    ("Victoza", 100000000124, "Novo Nordisk Inc", 169406012, 30),
    ("Januvia", 100000000088, "Merck Sharp & Dohme Corporation", 6027731, 26),
    ("Linzess", 100000000276, "Forest Laboratories, Inc", 456120130, 20),
    ("Bydureon", 100000000195, "AstraZeneca Pharmaceuticals LP", 310653001, 17),
    ("Latuda", 100000000276, "Forest Laboratories, Inc", 63402302, 14),
    ("Pradaxa", 100000000124, "Novo Nordisk Inc", 597013560, 11),
    ("Tradjenta", 100000000088, "Merck Sharp & Dohme Corporation", 597014030, 9),
    ("Belsomra", 100000000088, "Merck Sharp & Dohme Corporation", 6000501, 6),
    ("Dexilant", 100000000195, "AstraZeneca Pharmaceuticals LP", 64764017530, 4),
    ("Humira", 100000000286, "Bristol-Myers Squibb Company", 74379902, 3),
    ("Aciphex", 100000000232, "Janssen Pharmaceuticals, Inc", 62856024330, 1),
]

STATES = [
    ("CA", 56), ("NY", 40), ("TX", 31), ("FL", 29), ("NJ", 28), ("PA", 24), ("IL", 22),
    ("OH", 20), ("GA", 18), ("MI", 17), ("NC", 16), ("MA", 15), ("VA", 14), ("WA", 13),
    ("AZ", 12), ("TN", 11), ("MD", 10), ("IN", 10), ("MO", 9), ("MN", 9), ("WI", 8),
    ("CO", 8), ("AL", 7), ("SC", 7), ("LA", 6), ("KY", 6), ("OR", 6), ("OK", 5),
    ("CT", 5), ("IA", 5), ("MS", 4), ("AR", 4), ("KS", 4), ("UT", 4), ("NV", 4),
    ("NM", 3), ("NE", 3), ("WV", 3), ("ID", 2), ("HI", 2),
]


def fmt_amount(x):
    s = f"{x:.2f}"
    return s.rstrip("0").rstrip(".") if "." in s else s


def payments(rng):
    products = [p for p in PRODUCTS for _ in range(p[4])]
    states = [s for s, n in STATES for _ in range(n)]
    assert len(products) == ROWS and len(states) == ROWS
    rng.shuffle(products)
    rng.shuffle(states)

    start = datetime.date(2013, 8, 1)
    physicians = [str(rng.randrange(10_000, 999_999)) for _ in range(230)]
    rows = []
    for i in range(ROWS):
        name, man_id, man_name, ndc, _ = products[i]
        day = start + datetime.timedelta(days=rng.randrange(0, 212))
        amount = round(rng.lognormvariate(2.7, 1.4), 2)
        if rng.random() < 0.02:
            amount = 5000.0
        rows.append({
            "id": str(1_000_000 + i * 7),
            "applicable_manufacturer_or_applicable_gpo_making_payment_id": str(man_id),
            "date_of_payment": day.isoformat(),
            "general_transaction_id": str(400_000_000 + rng.randrange(0, 10**7)),
            "program_year": "2014",
            "product_name": name,
            "original_product_name": name,
            "product_ndc": str(ndc),
            "product_is_drug": "t" if rng.random() < 0.985 else "f",
            "payment_has_many": "t" if rng.random() < 0.45 else "f",
            "teaching_hospital_id": "0",
            "physician_profile_id": rng.choice(physicians),
            "recipient_state": states[i],
            "applicable_manufacturer_or_applicable_gpo_making_payment_name": man_name,
            "teaching_hospital_ccn": "0",
            "product_slug": "drug-" + name.lower(),
            "total_amount_of_payment_usdollars": fmt_amount(amount),
            "number_of_payments_included_in_total_amount": "1",
        })

    # Blank exactly 16 product_name cells, 12 of them Xarelto, so the column
    # shows Xarelto (200), Aciphex (1) and 3.20% missing.
    xarelto = [i for i, r in enumerate(rows) if r["product_name"] == "Xarelto"]
    others = [i for i, r in enumerate(rows) if r["product_name"] not in ("Xarelto", "Aciphex")]
    for i in rng.sample(xarelto, 12) + rng.sample(others, 4):
        rows[i]["product_name"] = ""
    for col, n in MISSING.items():
        if col == "product_name":
            continue
        candidates = list(range(ROWS))
        if col == "product_slug":
            candidates = [i for i in candidates if rows[i]["original_product_name"] != "Aciphex"]
        for i in rng.sample(candidates, n):
            rows[i][col] = ""
    return rows


def ground_truth(rng):
    out = []
    for state, _ in STATES:
        pop = rng.randrange(500_000, 40_000_000)
        white = rng.uniform(0.45, 0.9)
        black = rng.uniform(0.02, min(0.35, 1 - white))
        hispanic = rng.uniform(0.02, 0.4)
        asian = rng.uniform(0.01, 0.15)
        rural = rng.uniform(0.05, 0.6)
        out.append({
            "state": state,
            "population": str(pop),
            "white": f"{white:.4f}",
            "black": f"{black:.4f}",
            "hispanic": f"{hispanic:.4f}",
            "asian": f"{asian:.4f}",
            "rural": f"{rural:.4f}",
            "median_household_income": str(rng.randrange(40_000, 80_000)),
        })
    return out


def mixed(rng):
    """A small table covering every stratum, with two correlated measures."""
    rows = []
    start = datetime.date(2020, 1, 1)
    for i in range(120):
        height = rng.gauss(170, 9)
        weight = 0.9 * height - 85 + rng.gauss(0, 6)
        rows.append({
            "patient": f"P{i:04d}",
            "site": rng.choice(["north", "south", "east", "west", "central"]),
            "smoker": rng.choice(["true", "false", "false"]),
            "visit_date": (start + datetime.timedelta(days=rng.randrange(0, 400))).isoformat(),
            "height_cm": f"{height:.1f}",
            "weight_kg": f"{weight:.1f}",
            "visits": str(rng.randrange(0, 9)),
        })
    for col, n in [("site", 6), ("smoker", 3), ("height_cm", 9), ("weight_kg", 4), ("visits", 2)]:
        for i in rng.sample(range(len(rows)), n):
            rows[i][col] = "NA"
    return rows


VARIABLES = {
    "id": "A unique ID number for this payment and product combination",
    "applicable_manufacturer_or_applicable_gpo_making_payment_id": "ID of the manufacturer or GPO making the payment",
    "date_of_payment": "Date the payment was issued, or the first payment date for a series",
    "general_transaction_id": "System-assigned identifier of the general transaction",
    "program_year": "Calendar year for which the payment is reported",
    "product_name": "Standardized drug or device name",
    "original_product_name": "Drug or device name as submitted",
    "product_ndc": "National Drug Code of the product, when it is a drug",
    "product_is_drug": "t if the product is a drug, f if it is a medical device",
    "payment_has_many": "t if the original payment covered more than one product",
    "teaching_hospital_id": "Identifier of the teaching hospital receiving the payment",
    "physician_profile_id": "ID of the physician receiving the payment",
    "recipient_state": "State abbreviation of the recipient's primary business address",
    "applicable_manufacturer_or_applicable_gpo_making_payment_name": "Standardized name of the manufacturer or GPO",
    "teaching_hospital_ccn": "CMS Certification Number of the teaching hospital",
    "product_slug": "Slug used for web display of the product page",
    "total_amount_of_payment_usdollars": "U.S. dollar amount of the payment",
    "number_of_payments_included_in_total_amount": "Number of discrete payments in the total amount",
}


def meta():
    return {"modules": {
        "metadata": {
            "url": "https://projects.propublica.org/docdollars/",
            "domain": "healthcare",
            "keywords": ["physicians", "drugs", "medicine", "pharmaceutical", "transactions"],
            "license": "cc",
            "released": "JAN 2017",
            "range": {"from": "AUG 2013", "to": "DEC 2015"},
            "description": "Synthetic payments from drug and device makers to physicians, "
                           "one row per payment and product.",
        },
        "provenance": {
            "source": {"name": "U.S. Centers for Medicare & Medicaid Services",
                       "url": "https://www.cms.gov/OpenPayments/",
                       "email": "openpayments@cms.hhs.gov"},
            "author": {"name": "ProPublica",
                       "url": "https://www.propublica.org/datastore/",
                       "email": "data.store@propublica.org"},
        },
        "variables": {"entries": [{"name": k, "description": v} for k, v in VARIABLES.items()]},
        "ground_truth_correlations": {
            "ground_truth": {"name": "Synthetic state census", "url": None},
        },
    }}


def write_csv(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=header, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)


def main():
    rng = random.Random(2017)
    OUT.mkdir(parents=True, exist_ok=True)
    write_csv(OUT / "docs_payments.csv", COLUMNS, payments(rng))
    mx = mixed(rng)
    write_csv(OUT / "mixed_small.csv", list(mx[0].keys()), mx)
    gt = ground_truth(rng)
    write_csv(OUT / "census_states.csv", list(gt[0].keys()), gt)

    overrides = {
        c: {"stratum": "nominal", "subtype": "number"}
        for c in ["product_ndc", "teaching_hospital_id", "physician_profile_id", "teaching_hospital_ccn"]
    }
    overrides["applicable_manufacturer_or_applicable_gpo_making_payment_id"] = {
        "stratum": "ordinal", "subtype": "number"}
    overrides["program_year"] = {"stratum": "ordinal", "subtype": "number"}
    (OUT / "overrides.json").write_text(json.dumps(overrides, indent=2) + "\n")
    (OUT / "meta.json").write_text(json.dumps(meta(), indent=2) + "\n")


if __name__ == "__main__":
    main()
