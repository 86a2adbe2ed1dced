#!/usr/bin/env python3
"""Convert public parliament roll-call XML files to the votes.csv format.

The published vote results come as one XML document per sitting:

    <PV.RollCallVoteResults Sitting.Date="2019-07-18">
      <RollCallVote.Result Date="2019-07-18 12:26:45" Identifier="109446">
        <RollCallVote.Description.Text>B9-0001/2019 - Am 1</RollCallVote.Description.Text>
        <Result.For Number="83">
          <Result.PoliticalGroup.List Identifier="ECR">
            <PoliticalGroup.Member.Name MepId="197501">Aguilar</PoliticalGroup.Member.Name>
          </Result.PoliticalGroup.List>
        </Result.For>
        <Result.Against Number="...">...</Result.Against>
        <Result.Abstention Number="...">...</Result.Abstention>
      </RollCallVote.Result>
    </PV.RollCallVoteResults>

Each member listed under For/Against/Abstention becomes one CSV row carrying
the raw section token; members absent from a vote get no row, matching the
dense-matrix default.  Map the tokens during ingest with a table such as

    [tokens]
    For = Yes
    Against = No
    Abstention = Abstain

Correction-of-vote sections (Result.Intentions) record intent announced after
the fact, not the recorded vote, and are skipped.

Policy areas are not part of the vote XML.  Supply them separately with
--areas areas.csv (header rollcall_id,policy_area); unmapped roll-calls get an
empty policy_area field.

Usage:
    xml2csv.py --out votes.csv [--areas areas.csv] sitting1.xml [sitting2.xml ...]
"""

import argparse
import csv
import sys
import xml.etree.ElementTree as ET

SECTIONS = ("Result.For", "Result.Against", "Result.Abstention")


def local_name(tag):
    """Element tag without any XML namespace prefix."""
    return tag.rsplit("}", 1)[-1]


def find_by_local(parent, name):
    return [child for child in parent.iter() if local_name(child.tag) == name]


def result_date(result, sitting_date):
    raw = result.get("Date") or sitting_date or ""
    return raw.split(" ")[0].split("T")[0]


def load_area_map(path):
    areas = {}
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        missing = {"rollcall_id", "policy_area"} - set(reader.fieldnames or [])
        if missing:
            raise SystemExit(f"{path}: missing column(s) {', '.join(sorted(missing))}")
        for row in reader:
            areas[row["rollcall_id"]] = row["policy_area"]
    return areas


def convert(paths, areas):
    rows = []
    seen = set()
    for path in paths:
        try:
            root = ET.parse(path).getroot()
        except ET.ParseError as error:
            raise SystemExit(f"{path}: {error}")
        sitting_date = root.get("Sitting.Date")
        for result in find_by_local(root, "RollCallVote.Result"):
            rollcall_id = result.get("Identifier")
            if not rollcall_id:
                raise SystemExit(f"{path}: RollCallVote.Result without an Identifier attribute")
            if rollcall_id in seen:
                raise SystemExit(f"{path}: duplicate roll-call identifier '{rollcall_id}'")
            seen.add(rollcall_id)
            date = result_date(result, sitting_date)
            if not date:
                raise SystemExit(f"{path}: roll-call '{rollcall_id}' carries no date")
            area = areas.get(rollcall_id, "")
            for child in result:
                section = local_name(child.tag)
                if section not in SECTIONS:
                    continue
                token = section.split(".", 1)[1]  # For / Against / Abstention
                for name in find_by_local(child, "PoliticalGroup.Member.Name"):
                    voter_id = name.get("MepId") or name.get("PersId") or ""
                    voter_name = (name.text or "").strip()
                    if not voter_id and not voter_name:
                        raise SystemExit(
                            f"{path}: roll-call '{rollcall_id}' lists a member with neither id nor name"
                        )
                    rows.append((rollcall_id, date, area, voter_id, voter_name, token))
    return rows


def main(argv):
    parser = argparse.ArgumentParser(
        description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter
    )
    parser.add_argument("xml", nargs="+", help="roll-call vote result XML files")
    parser.add_argument("--out", required=True, help="votes.csv output path")
    parser.add_argument("--areas", help="optional rollcall_id,policy_area CSV")
    args = parser.parse_args(argv)

    areas = load_area_map(args.areas) if args.areas else {}
    rows = convert(args.xml, areas)

    with open(args.out, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["rollcall_id", "date", "policy_area", "voter_id", "voter_name", "value"])
        writer.writerows(rows)

    rollcalls = len({row[0] for row in rows})
    mapped = len({row[0] for row in rows if row[2]})
    print(f"wrote {len(rows)} vote records across {rollcalls} roll-calls "
          f"({mapped} with a policy area) to {args.out}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
