#!/usr/bin/env python3
"""Counts corpus statistics by direct text inspection, without the toolkit.

Writes subactions_per_verb.csv and object_frequency.csv into --out in the
same shape the stats command produces, so the two can be diffed byte for
byte. Kept deliberately separate from the C++ implementation: chunking,
counting and classification are all redone from scratch here.
"""
import argparse
import os
import re
import sys

VERBS = {"do_nothing", "grasp", "grab", "release", "move", "use", "position", "goto", "wait"}
IDENT = r"[a-z][a-z0-9_]*"

HEADER_RE = re.compile(rf"^def ({IDENT})\(start_t=[0-9.]+, stop_t=[0-9.]+\):$")
ACT_RE = re.compile(rf"^\s+({IDENT})\(([^)]*)\)$")
BLOCK_RE = re.compile(r"^\s+(if|while) (.+):$")
CALL_COND_RE = re.compile(rf"^(not )?({IDENT})\(([^)]*)\)$")


def split_chunks(text):
    chunks = []
    current = []
    for line in text.split("\n"):
        if line.startswith("def ") and current and any(
            ln.startswith("def ") for ln in current
        ):
            chunks.append(current)
            current = [line]
        else:
            current.append(line)
    if current:
        chunks.append(current)
    return chunks


def condition_objects(cond):
    m = CALL_COND_RE.match(cond)
    if m:
        args = [a.strip() for a in m.group(3).split(",") if a.strip()]
        return args, True
    tokens = cond.split()
    if not tokens or not re.fullmatch(IDENT, tokens[0]):
        return [], False
    objects = [tokens[0]]
    rest = tokens[1:]
    if rest and rest[0] == "not":
        rest = rest[1:]
    if rest == ["in", "hand"] or rest == ["in", "workspace"]:
        return objects, True
    if len(rest) == 1 and re.fullmatch(IDENT, rest[0]):
        return objects, True
    if len(rest) == 2 and rest[0] == "at" and re.fullmatch(IDENT, rest[1]):
        return objects + [rest[1]], True
    return [], False


def scan_chunk(lines):
    """Returns (name, act_count, objects) or None when the chunk is not a
    well-formed program by this script's own line grammar."""
    name = None
    acts = 0
    objects = []
    for line in lines:
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if line.startswith("def "):
            if name is not None:
                return None
            m = HEADER_RE.match(line)
            if not m:
                return None
            name = m.group(1)
            continue
        if name is None:
            # Preamble prose; opaque but harmless.
            continue
        m = ACT_RE.match(line)
        if m:
            if m.group(1) not in VERBS:
                return None
            acts += 1
            objects.extend(a.strip() for a in m.group(2).split(",") if a.strip())
            continue
        m = BLOCK_RE.match(line)
        if m:
            cond_objects, ok = condition_objects(m.group(2).strip())
            if not ok:
                return None
            objects.extend(cond_objects)
            continue
        return None
    if name is None:
        return None
    return name, acts, objects


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("corpus")
    ap.add_argument("--classes", help="CSV of name,class overrides")
    ap.add_argument("--out", required=True)
    ap.add_argument("--expect", help="directory of reference CSVs that must match")
    args = ap.parse_args()

    classes = {}
    if args.classes:
        with open(args.classes, encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                name, _, verb_class = line.partition(",")
                classes[name.strip()] = verb_class.strip()

    with open(args.corpus, encoding="utf-8") as f:
        text = f.read()

    histogram = {}
    frequency = {}
    failures = 0
    for chunk in split_chunks(text):
        if all(not ln.strip() for ln in chunk):
            continue
        scanned = scan_chunk(chunk)
        if scanned is None:
            failures += 1
            continue
        name, acts, objects = scanned
        verb_class = classes.get(name, name.split("_")[0])
        histogram.setdefault(verb_class, {}).setdefault(acts, 0)
        histogram[verb_class][acts] += 1
        for obj in objects:
            frequency[obj] = frequency.get(obj, 0) + 1

    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "subactions_per_verb.csv"), "w", encoding="utf-8") as f:
        f.write("verb_class,subaction_count,frequency\n")
        for verb_class in sorted(histogram):
            for count in sorted(histogram[verb_class]):
                f.write(f"{verb_class},{count},{histogram[verb_class][count]}\n")
    with open(os.path.join(args.out, "object_frequency.csv"), "w", encoding="utf-8") as f:
        f.write("object,frequency\n")
        for obj in sorted(frequency):
            f.write(f"{obj},{frequency[obj]}\n")

    if failures:
        print(f"{failures} chunk(s) failed to scan", file=sys.stderr)

    if args.expect:
        for name in ("subactions_per_verb.csv", "object_frequency.csv"):
            with open(os.path.join(args.out, name), encoding="utf-8") as f:
                produced = f.read()
            with open(os.path.join(args.expect, name), encoding="utf-8") as f:
                reference = f.read()
            if produced != reference:
                print(f"{name} differs from the reference copy", file=sys.stderr)
                return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
