#!/usr/bin/env python3
"""Generate the task-script fixtures (initial/expected workbooks, event logs, manifests).

Usage: gen_tasks.py OUT_DIR
"""
import json
import math
import sys
from pathlib import Path

COLS = ROWS = 10
LAYER = 0.025
MENU_R = 0.05
TRASH = (0.05, 0.94)
TAB_GAP = 0.1

FUNCTIONS = ["SUM", "AVERAGE", "MIN", "MAX", "COUNT", "ROUND", "ABS"]
TOP_MENU = ["function", "chart", "cluster"]


def center(cell):
    col = ord(cell[0]) - ord("A")
    row = int(cell[1:]) - 1
    return ((col + 0.5) / COLS, (row + 0.5) / ROWS)


def in_air(cell, sheets_right=1):
    x, y = center(cell)
    return (x + sheets_right * (1.0 + TAB_GAP), y)


def sector_point(cx, cy, index, count):
    deg = (index + 0.5) * 360.0 / count
    return (cx + MENU_R * math.cos(math.radians(deg)), cy + MENU_R * math.sin(math.radians(deg)))


def key_center(label):
    rows = [
        list("1234567890"),
        list("QWERTYUIOP"),
        list("ASDFGHJKL="),
        list("ZXCVBNM(),"),
        [":", "+", "-", "*", "/", ".", "@", "!", '"', "SPACE"],
        ["LEFT", "RIGHT", "BKSP", "ENTER", "ESC"],
    ]
    for r, row in enumerate(rows):
        if label in row:
            w = 1.0 / len(row)
            return ((row.index(label) + 0.5) * w, 0.52 + 0.08 * r + 0.04)
    raise KeyError(label)


class Script:
    def __init__(self):
        self.events = []

    def add(self, event):
        self.events.append(event)

    def tap(self, p):
        self.add({"kind": "penDown", "x": p[0], "y": p[1]})
        self.add({"kind": "penUp", "x": p[0], "y": p[1]})

    def drag(self, a, b):
        self.add({"kind": "penDown", "x": a[0], "y": a[1]})
        self.add({"kind": "penMove", "x": b[0], "y": b[1]})
        self.add({"kind": "penUp", "x": b[0], "y": b[1]})

    def hover(self, p, h):
        self.add({"kind": "penHover", "x": p[0], "y": p[1], "h": h})

    def button(self, which, pressed):
        self.add({"kind": "penButton", "button": which, "pressed": pressed})

    def click(self, which="primary"):
        self.button(which, True)
        self.button(which, False)

    def menu(self, origin, top, leaf, leaves):
        """Hover through a two-level pie menu opened at `origin`, then confirm."""
        self.click()
        self.hover(sector_point(*origin, TOP_MENU.index(top), len(TOP_MENU)), LAYER)
        self.hover(sector_point(*origin, leaves.index(leaf), len(leaves)), 2 * LAYER)
        self.click()

    def text(self):
        lines = ["#gridlayers-events v1"]
        for i, e in enumerate(self.events):
            lines.append(json.dumps({"type": "event", "t": 100 * (i + 1), "event": e}, separators=(",", ":")))
        return "\n".join(lines) + "\n"


def workbook(sheets, charts=(), toggles=None):
    doc = {
        "version": 1,
        "sheets": [{"name": name, "cells": cells} for name, cells in sheets],
        "clusters": [],
        "charts": list(charts),
    }
    if toggles:
        doc["toggles"] = toggles
    return json.dumps(doc, indent=2) + "\n"


def values(**cells):
    return {k: {"v": v} for k, v in cells.items()}


BASE = values(A1=1, B1=2, B2=3, B3=4, C1=5, C2=6, C3=7)
SHEET2 = values(A1=10, A2=20)


def sheets(sheet1_extra=None):
    cells = dict(BASE)
    cells.update(sheet1_extra or {})
    return [("Sheet1", cells), ("Sheet2", dict(SHEET2))]


def formula(text):
    return {"f": text}


def chart(trend=None):
    return {"id": 1, "anchor": "Sheet1!D1", "width": 3, "height": 4, "kind": "bar", "series": "Sheet1!B1:B3",
            "trend": None if trend is None else {"kind": trend, "coeffs": []}}


SUM = formula("=SUM(A1,B1:B3)")


def tasks():
    out = {}

    s = Script()
    s.tap(center("A4"))
    s.menu(center("A4"), "function", "SUM", FUNCTIONS)
    s.tap(center("A1"))
    s.drag(center("B1"), center("B3"))
    s.click()
    out["CF"] = (workbook(sheets()), s, workbook(sheets({"A4": SUM})), [("A4", 10)])

    s = Script()
    s.tap(center("C1"))
    s.button("primary", True)
    s.tap(center("C2"))
    s.button("primary", False)
    s.hover(center("A4"), LAYER)
    s.tap(center("A4"))
    out["AIC"] = (workbook(sheets({"A4": SUM})), s,
                  workbook(sheets({"A4": formula("=SUM(A1,B1:B3,C1,C2)")})), [("A4", 21)])

    s = Script()
    s.drag(center("C1"), center("C3"))
    s.hover(center("A4"), LAYER)
    s.tap(center("A4"))
    out["AR"] = (workbook(sheets({"A4": SUM})), s,
                 workbook(sheets({"A4": formula("=SUM(A1,B1:B3,C1:C3)")})), [("A4", 28)])

    s = Script()
    s.tap(center("A4"))
    s.add({"kind": "penDown", "x": center("B2")[0], "y": center("B2")[1]})
    s.add({"kind": "penMove", "x": TRASH[0], "y": TRASH[1]})
    s.add({"kind": "penUp", "x": TRASH[0], "y": TRASH[1]})
    out["RC"] = (workbook(sheets({"A4": SUM})), s,
                 workbook(sheets({"A4": formula("=SUM(A1,B1,B3)")})), [("A4", 7)])

    s = Script()
    s.drag(center("B1"), center("B3"))
    s.menu(center("B3"), "function", "AVERAGE", FUNCTIONS)
    s.tap(center("C4"))
    out["RE"] = (workbook(sheets({"A4": SUM})), s,
                 workbook(sheets({"A4": SUM, "C4": formula("=AVERAGE(B1:B3)")})), [("A4", 10), ("C4", 3)])

    s = Script()
    s.drag(center("B1"), center("B3"))
    s.menu(center("B3"), "chart", "bar", ["bar"])
    s.drag(center("D1"), center("F4"))
    out["AC"] = (workbook(sheets()), s, workbook(sheets(), [chart()]), [])

    s = Script()
    for i in range(6):
        s.hover((0.32 + 0.05 * i, 0.35 - 0.05 * i), 0.0)
    s.hover((0.9, 0.9), 0.0)
    out["AT"] = (workbook(sheets(), [chart()]), s, workbook(sheets(), [chart("linear")]), [])

    s = Script()
    s.tap(in_air("A1"))
    s.button("primary", True)
    s.tap(in_air("A2"))
    s.button("primary", False)
    s.hover(center("A4"), LAYER)
    s.tap(center("A4"))
    toggles = {"S": True}
    out["AIS"] = (workbook(sheets({"A4": SUM}), toggles=toggles), s,
                  workbook(sheets({"A4": formula("=SUM(A1,B1:B3,Sheet2!A1,Sheet2!A2)")}), toggles=toggles),
                  [("A4", 40)])
    return out


def reference_rc():
    s = Script()
    s.tap(center("A4"))
    s.click("secondary")
    for _ in range(3):
        s.tap(key_center("LEFT"))
    s.tap(key_center("BKSP"))
    s.tap(key_center(","))
    s.tap(key_center("ENTER"))
    return (workbook(sheets({"A4": SUM})), s, workbook(sheets({"A4": formula("=SUM(A1,B1,B3)")})), [("A4", 7)])


def write_task(directory, name, task):
    initial, script, expected, expected_values = task
    directory.mkdir(parents=True, exist_ok=True)
    (directory / f"{name}.initial.glw").write_text(initial)
    (directory / f"{name}.glev").write_text(script.text())
    (directory / f"{name}.expected.glw").write_text(expected)
    manifest = {
        "name": name,
        "initial": f"{name}.initial.glw",
        "events": f"{name}.glev",
        "expected": f"{name}.expected.glw",
        "expectedValues": [{"cell": c, "value": v} for c, v in expected_values],
    }
    (directory / f"{name}.json").write_text(json.dumps(manifest, indent=2) + "\n")


def main():
    if len(sys.argv) != 2:
        sys.exit(__doc__)
    root = Path(sys.argv[1])
    for name, task in tasks().items():
        write_task(root / "tasks", name, task)
    write_task(root / "reference", "RC_text", reference_rc())
    (root / "fixture.glw").write_text(
        workbook([("Sheet1", {**values(A1=1, B1=2, B2=3, B3=4), "A4": SUM})]))


if __name__ == "__main__":
    main()
