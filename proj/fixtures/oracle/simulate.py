#!/usr/bin/env python3
"""Brute-force simulation of the world suite under drop noise.

Recomputes, without touching the C++ code, what the engine must report for
`bench --suite world --noise drop25.json --seed 7`: the mock backend drops a
scan key when fnv(seed, "drop", relation, key) maps below the drop rate, and
with drop noise alone the engine's answer for every query equals a plain
evaluation over the store with the dropped keys removed. The script freezes
per-case f and cell-match numbers plus the summary into a JSON file the
tests compare against at 1e-9.

Run from anywhere: paths resolve relative to this file. Rewrites
world_drop25_seed7.json in place.
"""

import csv
import json
import math
import os

HERE = os.path.dirname(os.path.abspath(__file__))
WORLD = os.path.join(HERE, "..", "suites", "world")

SEED = 7
DROP_RATE = 0.25
TOLERANCE = 0.05

FNV_OFFSET = 14695981039346656037
FNV_PRIME = 1099511628211
MASK = (1 << 64) - 1


def fnv(seed, parts):
    h = FNV_OFFSET
    def mix(byte):
        nonlocal h
        h = ((h ^ byte) * FNV_PRIME) & MASK
    for i in range(8):
        mix((seed >> (8 * i)) & 0xFF)
    for part in parts:
        mix(0)
        for byte in part.encode():
            mix(byte)
    return h


def dropped(relation, key):
    return (fnv(SEED, ["drop", relation, key]) >> 11) * 2.0 ** -53 < DROP_RATE


TYPES = {
    "country": {"name": "text", "continent": "text", "population": "int",
                "gdp": "float", "code": "text"},
    "city": {"name": "text", "country": "text", "population": "int",
             "is_capital": "bool"},
    "employees": {"id": "int", "name": "text", "country": "text", "salary": "float"},
}


def convert(raw, ty):
    if raw is None or raw == "":
        return None
    if ty == "int":
        return int(raw)
    if ty == "float":
        return float(raw)
    if ty == "bool":
        return raw == "true"
    return raw


def load_tables(drop):
    with open(os.path.join(WORLD, "facts.json")) as fh:
        facts = json.load(fh)
    tables = {}
    for rel in ("country", "city"):
        key_attr = "name"
        rows = []
        for key in facts["keys"][rel]:
            if drop and dropped(rel, key):
                continue
            row = {key_attr: key}
            row.update(facts["cells"][rel][key])
            rows.append({a: convert(row.get(a), t) for a, t in TYPES[rel].items()})
        tables[rel] = rows
    with open(os.path.join(WORLD, "employees.csv")) as fh:
        rows = []
        for record in csv.DictReader(fh):
            rows.append({a: convert(record[a], t) for a, t in TYPES["employees"].items()})
        tables["employees"] = rows
    return tables


# Each case from cases.json, restated structurally. items: ("col", ref),
# ("agg", fn, ref), or ("count_star",). order_by indexes projected columns.
CASES = [
    ("all_countries", [("c", "country")], [], [("col", "c.name")],
     [], [], False, None),
    ("capitals", [("c", "city")], [("c.is_capital", "=", True)],
     [("col", "c.name")], [], [], False, None),
    ("europe_countries", [("c", "country")], [("c.continent", "=", "Europe")],
     [("col", "c.name")], [], [], False, None),
    ("big_cities", [("c", "city")], [("c.population", ">", 3000000)],
     [("col", "c.name"), ("col", "c.population")], [], [], False, None),
    ("city_countries", [("c", "city")], [],
     [("col", "c.name"), ("col", "c.country")], [], [], False, None),
    ("country_codes", [("c", "country")], [], [("col", "c.code")],
     [], [], False, None),
    ("small_cities", [("c", "city")], [("c.population", "<", 2500000)],
     [("col", "c.name")], [], [], False, None),
    ("not_europe", [("c", "country")], [("c.continent", "!=", "Europe")],
     [("col", "c.name")], [], [], False, None),
    ("empty_result", [("c", "country")],
     [("c.continent", "=", "Europe"), ("c.population", ">", 100000000)],
     [("col", "c.name")], [], [], False, None),
    ("count_cities", [("c", "city")], [], [("count_star",)], [], [], False, None),
    ("avg_city_pop", [("c", "city")], [], [("agg", "avg", "c.population")],
     [], [], False, None),
    ("count_by_capital", [("c", "city")], [],
     [("col", "c.is_capital"), ("count_star",)], ["c.is_capital"], [], False, None),
    ("max_gdp", [("c", "country")], [], [("agg", "max", "c.gdp")], [], [], False, None),
    ("count_european", [("c", "country")], [("c.continent", "=", "Europe")],
     [("count_star",)], [], [], False, None),
    ("min_city_pop", [("c", "city")], [], [("agg", "min", "c.population")],
     [], [], False, None),
    ("by_continent", [("c", "country")], [],
     [("col", "c.continent"), ("count_star",)], ["c.continent"],
     [(0, False)], False, None),
    ("city_continent", [("c", "city"), ("k", "country")],
     [("c.country", "=", ("ref", "k.name"))],
     [("col", "c.name"), ("col", "k.continent")], [], [], False, None),
    ("asian_cities", [("c", "city"), ("k", "country")],
     [("c.country", "=", ("ref", "k.name")), ("k.continent", "=", "Asia")],
     [("col", "c.name")], [], [], False, None),
    ("euro_employees", [("e", "employees"), ("c", "country")],
     [("e.country", "=", ("ref", "c.name")), ("c.continent", "=", "Europe")],
     [("col", "e.name")], [], [], False, None),
    ("salary_by_continent", [("e", "employees"), ("c", "country")],
     [("e.country", "=", ("ref", "c.name"))],
     [("col", "c.continent"), ("agg", "avg", "e.salary")], ["c.continent"],
     [], False, None),
    ("distinct_home", [("c", "city")], [], [("col", "c.country")],
     [], [], True, None),
    ("top_cities", [("c", "city")], [],
     [("col", "c.name"), ("col", "c.population")], [], [(1, True)], False, 3),
    ("first_countries", [("c", "country")], [], [("col", "c.name")],
     [], [(0, False)], False, 2),
]


def cell_key(value):
    # Mirrors the engine's total order: null, bool, numeric, text.
    if value is None:
        return (0, 0)
    if isinstance(value, bool):
        return (1, int(value))
    if isinstance(value, (int, float)):
        return (2, float(value))
    return (3, value)


def sort_key(row):
    return [cell_key(v) for v in row]


def holds(op, a, b):
    if a is None or b is None:
        return False
    if op == "=":
        return a == b
    if op == "!=":
        return a != b
    if op == "<":
        return a < b
    if op == ">":
        return a > b
    if op == "<=":
        return a <= b
    return a >= b


def evaluate(case, tables):
    _, froms, preds, items, group_by, order_by, distinct, limit = case
    rows = [{}]
    for alias, rel in froms:
        rows = [dict(r, **{f"{alias}.{a}": v for a, v in t.items()})
                for r in rows for t in tables[rel]]
    for lhs, op, rhs in preds:
        literal = not (isinstance(rhs, tuple) and rhs[0] == "ref")
        rows = [r for r in rows
                if holds(op, r[lhs], rhs if literal else r[rhs[1]])]

    aggregated = any(item[0] != "col" for item in items) or group_by
    if aggregated:
        groups = {}
        order = []
        for r in rows:
            token = tuple(r[g] for g in group_by)
            if token not in groups:
                groups[token] = []
                order.append(token)
            groups[token].append(r)
        if not groups and not group_by:
            groups[()] = []
            order.append(())
        out = []
        for token in order:
            members = groups[token]
            row = []
            for item in items:
                if item[0] == "count_star":
                    row.append(len(members))
                elif item[0] == "col":
                    row.append(members[0][item[1]] if members else None)
                else:
                    values = [m[item[2]] for m in members if m[item[2]] is not None]
                    if not values:
                        row.append(None)
                    elif item[1] == "avg":
                        row.append(math.fsum(values) / len(values))
                    elif item[1] == "min":
                        row.append(min(values))
                    elif item[1] == "max":
                        row.append(max(values))
                    else:
                        row.append(sum(values))
            out.append(row)
    else:
        out = [[r[item[1]] for item in items] for r in rows]

    if distinct:
        seen = set()
        kept = []
        for row in out:
            token = tuple(row)
            if token not in seen:
                seen.add(token)
                kept.append(row)
        out = kept
    for index, desc in reversed(order_by):
        out.sort(key=lambda row: cell_key(row[index]), reverse=desc)
    if limit is not None:
        out = out[:limit]
    if not order_by:
        out.sort(key=sort_key)
    return out


def key_index(case):
    items = case[3]
    for i, item in enumerate(items):
        if item[0] == "col":
            return i
    return None


def norm_key(value):
    if isinstance(value, bool):
        return ("b", value)
    if isinstance(value, (int, float)):
        return ("n", float(value))
    if value is None:
        return ("z",)
    return ("t", value.strip().lower())


def cells_match(engine, truth):
    if engine is None or truth is None:
        return engine is None and truth is None
    if isinstance(engine, bool) or isinstance(truth, bool):
        return engine == truth
    if isinstance(engine, (int, float)) and isinstance(truth, (int, float)):
        if truth == 0:
            return engine == 0
        return abs(engine - truth) / abs(truth) < TOLERANCE
    return str(engine).strip().lower() == str(truth).strip().lower()


def score(case, engine, truth):
    key = key_index(case)
    used = [False] * len(engine)
    matched = 0
    for t, trow in enumerate(truth):
        aligned = None
        if key is None:
            if t < len(engine):
                aligned = t
        else:
            for e, erow in enumerate(engine):
                if not used[e] and norm_key(erow[key]) == norm_key(trow[key]):
                    aligned = e
                    break
        if aligned is None:
            continue
        used[aligned] = True
        matched += sum(1 for c in range(len(trow))
                       if cells_match(engine[aligned][c], trow[c]))
    total = len(truth) * (len(truth[0]) if truth else 0)
    percent = 100.0 if total == 0 else 100.0 * matched / total
    return percent


def main():
    full = load_tables(drop=False)
    reduced = load_tables(drop=True)

    results = []
    one_minus_f = []
    cell_percents = []
    excluded = 0
    near_empty = 0
    for case in CASES:
        truth = evaluate(case, full)
        engine = evaluate(case, reduced)
        entry = {"id": case[0], "truth_rows": len(truth), "engine_rows": len(engine)}
        if len(truth) + len(engine) > 0:
            f = 2.0 * len(truth) / (len(truth) + len(engine))
            entry["f"] = f
            one_minus_f.append(1.0 - f)
            if f > 1.99:
                near_empty += 1
        else:
            entry["f"] = None
            excluded += 1
        entry["cell_percent"] = score(case, engine, truth)
        cell_percents.append(entry["cell_percent"])
        results.append(entry)

    total = 0.0
    for v in one_minus_f:
        total += v
    cell_total = 0.0
    for v in cell_percents:
        cell_total += v
    summary = {
        "one_minus_f_percent": 100.0 * total / len(one_minus_f),
        "cell_match_percent": cell_total / len(cell_percents),
        "excluded": excluded,
        "near_empty": near_empty,
    }

    doc = {
        "suite": "world",
        "seed": SEED,
        "drop_rate": DROP_RATE,
        "dropped": {
            rel: [k for k in keys if dropped(rel, k)]
            for rel, keys in (("country", [r["name"] for r in full["country"]]),
                              ("city", [r["name"] for r in full["city"]]))
        },
        "cases": results,
        "summary": summary,
    }
    out = os.path.join(HERE, "world_drop25_seed7.json")
    with open(out, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    print(json.dumps(summary, indent=2))
    print("dropped:", doc["dropped"])


if __name__ == "__main__":
    main()
