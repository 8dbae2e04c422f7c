"""
Excel export van de benchmarktabel.

Schrijft de tabel naar een .xlsx werkboek met een gestylede header, de
gepubliceerde waarden als cel commentaar en een stempel: het manifest als
JSON in een verborgen metadata sheet plus een named range met de preset code.
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd
from openpyxl import Workbook, load_workbook
from openpyxl.comments import Comment
from openpyxl.styles import Alignment, Font, PatternFill
from openpyxl.workbook.defined_name import DefinedName
from openpyxl.worksheet.worksheet import Worksheet

from .manifest import GENERATOR_NAME, RunManifest, validate_manifest

logger = logging.getLogger(__name__)

METADATA_SHEET_NAME = "_SENSING_META"
STAMP_NAMED_RANGE = "SENSING_STAMP"
TABLE_SHEET_NAME = "Benchmark"

HEADER_COLOR = "#FFF2CC"
COMMENT_AUTHOR = "Sensing Benchmark"

HEADER_LABELS = {
    "pf": "P_f",
    "pd_-12": "P_d @ -12 dB",
    "pd_-10": "P_d @ -10 dB",
    "pd_-8": "P_d @ -8 dB",
}


class Table1Workbook:
    """
    Schrijver voor het benchmark werkboek.
    """

    def __init__(self, header_color: str = HEADER_COLOR):
        """
        Args:
            header_color: Hex kleur van de header rij
        """
        color = header_color.lstrip("#")
        self.header_fill = PatternFill(start_color=color, end_color=color, fill_type="solid")

    def write(self,
              path: Path,
              frame: pd.DataFrame,
              manifest: RunManifest,
              published_frame: Optional[pd.DataFrame] = None) -> Path:
        """
        Schrijf de tabel met stempel.

        Args:
            path: Doelbestand (.xlsx)
            frame: Uitvoer van table1_frame
            manifest: Manifest van de run
            published_frame: Gepubliceerde waarden voor het commentaar

        Returns:
            Pad van het werkboek

        Raises:
            ValueError: Als het bestand niet opgeslagen kan worden
        """
        path = Path(path)
        wb = Workbook()
        ws = wb.active
        ws.title = TABLE_SHEET_NAME

        self._write_table(ws, frame, published_frame)
        self._embed_stamp(wb, manifest)

        path.parent.mkdir(parents=True, exist_ok=True)
        try:
            wb.save(path)
        except OSError as e:
            raise ValueError(f"Kan werkboek niet opslaan naar {path}: {e}")
        logger.info("Werkboek geschreven: %s", path)
        return path

    def _write_table(self, ws: Worksheet, frame: pd.DataFrame, published_frame: Optional[pd.DataFrame]) -> None:
        value_columns = [c for c in frame.columns if not c.endswith("_hw")]

        ws.cell(row=1, column=1, value="Schema")
        for j, column in enumerate(value_columns, start=2):
            ws.cell(row=1, column=2 * j - 2, value=HEADER_LABELS.get(column, column))
            ws.cell(row=1, column=2 * j - 1, value="±")
        for cell in ws[1]:
            cell.fill = self.header_fill
            cell.font = Font(bold=True)
            cell.alignment = Alignment(horizontal="center")

        for i, (label, row) in enumerate(frame.iterrows(), start=2):
            ws.cell(row=i, column=1, value=label)
            for j, column in enumerate(value_columns, start=2):
                value_cell = ws.cell(row=i, column=2 * j - 2, value=_cell_value(row.get(column)))
                value_cell.number_format = "0.0000"
                hw_cell = ws.cell(row=i, column=2 * j - 1, value=_cell_value(row.get(f"{column}_hw")))
                hw_cell.number_format = "0.0000"

                if published_frame is not None and label in published_frame.index and column in published_frame.columns:
                    published = published_frame.at[label, column]
                    comment = Comment(f"Gepubliceerd: {published:.4f}", COMMENT_AUTHOR)
                    comment.width = 160
                    comment.height = 40
                    value_cell.comment = comment

        ws.column_dimensions["A"].width = 16
        ws.freeze_panes = "B2"

    def _embed_stamp(self, wb: Workbook, manifest: RunManifest) -> None:
        """Verborgen metadata sheet met manifest (A1) en preset code (B1), plus named range."""
        if METADATA_SHEET_NAME in wb.sheetnames:
            wb.remove(wb[METADATA_SHEET_NAME])
        meta_ws = wb.create_sheet(METADATA_SHEET_NAME)
        meta_ws.sheet_state = "hidden"
        meta_ws["A1"] = manifest.to_json()
        meta_ws["B1"] = manifest.preset_code
        meta_ws["A3"] = f"Generated: {manifest.timestamp}"
        meta_ws["A4"] = f"Generator: {GENERATOR_NAME} v{manifest.version}"

        if STAMP_NAMED_RANGE in wb.defined_names:
            del wb.defined_names[STAMP_NAMED_RANGE]
        wb.defined_names[STAMP_NAMED_RANGE] = DefinedName(
            STAMP_NAMED_RANGE, attr_text=f"'{METADATA_SHEET_NAME}'!$B$1"
        )


def _cell_value(value: Any) -> Optional[float]:
    if value is None:
        return None
    value = float(value)
    return None if math.isnan(value) else value


def write_table1_workbook(path: Path,
                          frame: pd.DataFrame,
                          manifest: RunManifest,
                          published_frame: Optional[pd.DataFrame] = None) -> Path:
    """Schrijf de benchmarktabel naar een werkboek met stempel."""
    return Table1Workbook().write(path, frame, manifest, published_frame)


def read_workbook_manifest(path: Path) -> Optional[Tuple[Dict[str, Any], Optional[str]]]:
    """
    Extraheer het manifest uit een werkboek.

    Args:
        path: Pad naar het werkboek

    Returns:
        Tuple van (manifest dict, preset code) of None zonder stempel
    """
    path = Path(path)
    try:
        wb = load_workbook(path)
    except Exception as e:
        logger.warning("Kon werkboek %s niet openen: %s", path, e)
        return None

    try:
        if METADATA_SHEET_NAME not in wb.sheetnames:
            return None
        meta_ws = wb[METADATA_SHEET_NAME]
        manifest = None
        if meta_ws["A1"].value:
            try:
                manifest = json.loads(meta_ws["A1"].value)
            except json.JSONDecodeError:
                logger.warning("Ongeldige JSON in metadata sheet van %s", path)
        preset_code = meta_ws["B1"].value
        if manifest is None and not preset_code:
            return None
        return manifest, preset_code
    finally:
        wb.close()


def validate_stamp(path: Path) -> Tuple[bool, List[str]]:
    """
    Valideer de stempel van een werkboek.

    Returns:
        Tuple van (is_valid, errors)
    """
    errors: List[str] = []
    try:
        wb = load_workbook(path)
    except Exception as e:
        return False, [f"Kan bestand niet lezen: {e}"]

    try:
        if METADATA_SHEET_NAME not in wb.sheetnames:
            return False, ["Metadata sheet niet gevonden"]
        meta_ws = wb[METADATA_SHEET_NAME]

        raw = meta_ws["A1"].value
        if not raw:
            errors.append("Geen JSON data in metadata sheet")
        else:
            try:
                data = json.loads(raw)
            except json.JSONDecodeError as e:
                errors.append(f"Ongeldige JSON in metadata: {e}")
            else:
                errors.extend(validate_manifest(data)[1])
                if meta_ws["B1"].value and data.get("preset_code") != meta_ws["B1"].value:
                    errors.append("Preset code in B1 wijkt af van het manifest")

        if not meta_ws["B1"].value:
            errors.append("Preset code ontbreekt in metadata sheet")
        if STAMP_NAMED_RANGE not in wb.defined_names:
            errors.append(f"{STAMP_NAMED_RANGE} named range niet gevonden")
    finally:
        wb.close()

    return len(errors) == 0, errors
