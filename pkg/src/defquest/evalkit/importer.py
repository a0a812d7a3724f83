"""Column-mapped importer for external annotation datasets.

The published datasets this feeds from have no fixed layout, so the
mapping lives in a JSON config:

    {
        "delimiter": ",",                 // optional, default ","
        "question_id": "question",        // column holding the question id
        "rater_id": "annotator",          // column holding the rater id,
        "rater_id_value": "r1",           //   or a fixed value per file
        "items": {"understandable": "col_a", ...},
        "label_map": {"Yes": "yes", ...}, // optional per-cell rewrite
        "na_values": ["", "NA", "n/a"]    // optional, default shown
    }

Rows become AnnotationRecords with ts = row index; values found in
``na_values`` are normalized to the NA category.
"""

import csv
import io
import json

from ..errors import DataError
from .scheme import NOT_APPLICABLE, AnnotationRecord

DEFAULT_NA_VALUES = ("", "NA", "n/a", "na", "N/A")


def load_mapping(source) -> dict:
    text = source if isinstance(source, str) else source.read()
    mapping = json.loads(text)
    if "items" not in mapping or not isinstance(mapping["items"], dict):
        raise DataError("mapping must define an 'items' column map")
    if "question_id" not in mapping:
        raise DataError("mapping must name the question_id column")
    if "rater_id" not in mapping and "rater_id_value" not in mapping:
        raise DataError("mapping must define rater_id or rater_id_value")
    return mapping


def load_mapped_annotations(source, mapping: dict) -> list[AnnotationRecord]:
    text = source if isinstance(source, str) else source.read()
    na_values = set(mapping.get("na_values", DEFAULT_NA_VALUES))
    label_map = mapping.get("label_map", {})
    reader = csv.DictReader(io.StringIO(text), delimiter=mapping.get("delimiter", ","))
    records = []
    for row_no, row in enumerate(reader):
        try:
            question_id = row[mapping["question_id"]]
        except KeyError:
            raise DataError(
                f"row {row_no}: missing column {mapping['question_id']!r}"
            ) from None
        if "rater_id" in mapping:
            rater_id = row.get(mapping["rater_id"])
            if rater_id is None:
                raise DataError(f"row {row_no}: missing column {mapping['rater_id']!r}")
        else:
            rater_id = mapping["rater_id_value"]
        responses = {}
        for item_id, column in mapping["items"].items():
            if column not in row:
                raise DataError(f"row {row_no}: missing column {column!r}")
            value = (row[column] or "").strip()
            value = label_map.get(value, value)
            responses[item_id] = NOT_APPLICABLE if value in na_values else value
        records.append(
            AnnotationRecord(
                question_id=question_id,
                rater_id=rater_id,
                responses=responses,
                ts=float(row_no),
            )
        )
    if not records:
        raise DataError("no annotation rows found")
    return records
