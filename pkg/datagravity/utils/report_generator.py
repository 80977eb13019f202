import logging
import os
from typing import List, Optional

from reportlab.lib import colors
from reportlab.lib.enums import TA_CENTER, TA_JUSTIFY
from reportlab.lib.pagesizes import A4
from reportlab.lib.styles import ParagraphStyle, getSampleStyleSheet
from reportlab.lib.units import inch
from reportlab.platypus import Paragraph, SimpleDocTemplate, Table, TableStyle

from datagravity import config
from datagravity.utils.types import ClaimKind, ClaimReport, ClaimStatus, DivisionMode, Interval, MeasurementRecord

logger = logging.getLogger(__name__)

STATUS_COLORS = {
    ClaimStatus.PASS: "#2f855a",
    ClaimStatus.FAIL: "#c53030",
    ClaimStatus.NOTED: "#4a5568",
}


class ReportGenerator:
    TITLE = "Data Gravity Claim Report"
    SUBTITLE = "Disjunction constants derived from stored energy measurements"

    def __init__(self, output_dir: Optional[str] = None):
        self.output_dir = config.REPORT_DIR if output_dir is None else output_dir
        self.styles = getSampleStyleSheet()
        self._create_custom_styles()

    def _create_custom_styles(self):
        self.styles.add(ParagraphStyle(
            name="ReportHeader",
            parent=self.styles["Heading1"],
            fontSize=20,
            textColor=colors.HexColor("#1a365d"),
            alignment=TA_CENTER,
            spaceAfter=6,
        ))

        self.styles.add(ParagraphStyle(
            name="ReportTagline",
            parent=self.styles["Normal"],
            fontSize=10,
            textColor=colors.HexColor("#4a5568"),
            alignment=TA_CENTER,
            spaceAfter=20,
        ))

        self.styles.add(ParagraphStyle(
            name="SectionTitle",
            parent=self.styles["Heading2"],
            fontSize=13,
            textColor=colors.HexColor("#2d3748"),
            spaceBefore=14,
            spaceAfter=8,
        ))

        self.styles.add(ParagraphStyle(
            name="Cell",
            parent=self.styles["Normal"],
            fontSize=8,
            leading=10,
        ))

        self.styles.add(ParagraphStyle(
            name="Note",
            parent=self.styles["Normal"],
            fontSize=8,
            textColor=colors.HexColor("#718096"),
            alignment=TA_JUSTIFY,
            spaceBefore=12,
        ))

    def generate_claim_report(
        self,
        report: ClaimReport,
        records: List[MeasurementRecord],
        mode: DivisionMode = DivisionMode.ENDPOINT,
        filepath: Optional[str] = None,
    ) -> str:
        if filepath is None:
            os.makedirs(self.output_dir, exist_ok=True)
            filepath = os.path.join(self.output_dir, f"claim_report_{DivisionMode(mode).value}.pdf")

        # invariant=1: no creation date or random document id in the file
        doc = SimpleDocTemplate(
            filepath,
            pagesize=A4,
            rightMargin=0.75 * inch,
            leftMargin=0.75 * inch,
            topMargin=0.75 * inch,
            bottomMargin=0.75 * inch,
            title=self.TITLE,
            invariant=1,
        )

        story = []
        story.append(Paragraph(self.TITLE, self.styles["ReportHeader"]))
        story.append(Paragraph(
            f"{self.SUBTITLE} (interval division: {DivisionMode(mode).value})",
            self.styles["ReportTagline"],
        ))

        passed = sum(1 for c in report.checks if c.status == ClaimStatus.PASS)
        failed = len(report.failures)
        noted = sum(1 for c in report.checks if c.status == ClaimStatus.NOTED)
        summary = Table(
            [["Passed", str(passed)], ["Failed", str(failed)], ["Noted", str(noted)]],
            colWidths=[2 * inch, 1 * inch],
        )
        summary.setStyle(TableStyle([
            ("FONTSIZE", (0, 0), (-1, -1), 10),
            ("GRID", (0, 0), (-1, -1), 0.5, colors.HexColor("#e2e8f0")),
            ("BACKGROUND", (0, 0), (-1, -1), colors.HexColor("#f7fafc")),
            ("ALIGN", (1, 0), (1, -1), "RIGHT"),
        ]))
        story.append(summary)

        story.append(Paragraph("Claims", self.styles["SectionTitle"]))
        cell = self.styles["Cell"]
        rows = [[Paragraph(f"<b>{h}</b>", cell) for h in ("Claim", "Status", "Expected", "Derived", "Rel. error")]]
        for check in report.checks:
            unit = " J" if check.kind == ClaimKind.ENERGY_PER_OP else ""
            rows.append([
                Paragraph(check.label, cell),
                Paragraph(f'<font color="{STATUS_COLORS[check.status]}">{check.status.value.upper()}</font>', cell),
                Paragraph(_interval_text(check.expected) + unit, cell),
                Paragraph(_interval_text(check.derived) + unit, cell),
                Paragraph("-" if check.relative_error is None else f"{check.relative_error:.2%}", cell),
            ])
        claims_table = Table(rows, colWidths=[2.2 * inch, 0.7 * inch, 1.3 * inch, 1.3 * inch, 0.8 * inch], repeatRows=1)
        claims_table.setStyle(_grid_style())
        story.append(claims_table)

        story.append(Paragraph("Measurement records (pJ per operation or per 64-bit access)", self.styles["SectionTitle"]))
        rows = [[Paragraph(f"<b>{h}</b>", cell) for h in ("Key", "Source", "Node", "E_move", "E_compute")]]
        for record in records:
            rows.append([
                Paragraph(record.key, cell),
                Paragraph(record.source, cell),
                Paragraph(record.node, cell),
                Paragraph(_interval_text(record.e_move, 1e12), cell),
                Paragraph(_interval_text(record.e_compute, 1e12), cell),
            ])
        records_table = Table(rows, colWidths=[1.3 * inch, 1.6 * inch, 1.5 * inch, 1.1 * inch, 0.8 * inch], repeatRows=1)
        records_table.setStyle(_grid_style())
        story.append(records_table)

        story.append(Paragraph(
            "Every derived value is recomputed from the stored energies; no disjunction constant is "
            "stored directly. Noted claims are informative and never fail the check.",
            self.styles["Note"],
        ))

        doc.build(story)
        logger.info(f"📄 Claim report written to {filepath}")
        return filepath


def _grid_style() -> TableStyle:
    return TableStyle([
        ("VALIGN", (0, 0), (-1, -1), "TOP"),
        ("GRID", (0, 0), (-1, -1), 0.5, colors.HexColor("#e2e8f0")),
        ("BACKGROUND", (0, 0), (-1, 0), colors.HexColor("#edf2f7")),
        ("PADDING", (0, 0), (-1, -1), 4),
    ])


def _interval_text(interval: Optional[Interval], scale: float = 1.0) -> str:
    if interval is None:
        return "-"
    if interval.is_point:
        return f"{interval.low * scale:.4g}"
    return f"{interval.low * scale:.4g} - {interval.high * scale:.4g}"
