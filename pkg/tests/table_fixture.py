"""Hand-transcribed 7x7 rule table fixture.

Each entry is (e_label, de_label) -> output label, written out cell by cell
so the test asserts against an independent transcription rather than the
package's own grid parser.
"""

RULE_TABLE_CELLS = {
    # de = PL row
    ("NL", "PL"): "NL", ("NM", "PL"): "NM", ("NS", "PL"): "NS", ("ZR", "PL"): "ZR",
    ("PS", "PL"): "PM", ("PM", "PL"): "PL", ("PL", "PL"): "PL",
    # de = PM row
    ("NL", "PM"): "NL", ("NM", "PM"): "NL", ("NS", "PM"): "NM", ("ZR", "PM"): "ZR",
    ("PS", "PM"): "PM", ("PM", "PM"): "PL", ("PL", "PM"): "PL",
    # de = PS row
    ("NL", "PS"): "NL", ("NM", "PS"): "NL", ("NS", "PS"): "NS", ("ZR", "PS"): "ZR",
    ("PS", "PS"): "PS", ("PM", "PS"): "PL", ("PL", "PS"): "PL",
    # de = ZR row
    ("NL", "ZR"): "NL", ("NM", "ZR"): "NM", ("NS", "ZR"): "NS", ("ZR", "ZR"): "ZR",
    ("PS", "ZR"): "PS", ("PM", "ZR"): "PM", ("PL", "ZR"): "PL",
    # de = NS row
    ("NL", "NS"): "NL", ("NM", "NS"): "NL", ("NS", "NS"): "NS", ("ZR", "NS"): "ZR",
    ("PS", "NS"): "PS", ("PM", "NS"): "PL", ("PL", "NS"): "PL",
    # de = NM row
    ("NL", "NM"): "NL", ("NM", "NM"): "NL", ("NS", "NM"): "NM", ("ZR", "NM"): "ZR",
    ("PS", "NM"): "PM", ("PM", "NM"): "PL", ("PL", "NM"): "PL",
    # de = NL row
    ("NL", "NL"): "NL", ("NM", "NL"): "NL", ("NS", "NL"): "NM", ("ZR", "NL"): "ZR",
    ("PS", "NL"): "PS", ("PM", "NL"): "PM", ("PL", "NL"): "PL",
}

assert len(RULE_TABLE_CELLS) == 49
