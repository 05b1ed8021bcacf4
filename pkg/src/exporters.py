import csv
import io
import json
import math
import os
from datetime import datetime
from typing import Dict, List, Optional, Sequence

import numpy as np

from .config import Config
from .logger import logger
from .semiring import BOTTOM_JSON


class ResultExporter:
    """Render command results as JSON, CSV or text, and save them under the outputs directory."""

    @staticmethod
    def round_float(x: float, digits: Optional[int] = None):
        """Round to ``digits`` significant digits; -inf becomes the bottom marker."""
        digits = Config.OUTPUT_DIGITS if digits is None else digits
        x = float(x)
        if x == -math.inf:
            return BOTTOM_JSON
        if math.isinf(x) or math.isnan(x):
            return str(x)
        return float(f"{x:.{digits}g}") + 0.0

    @staticmethod
    def prepare(obj, digits: Optional[int] = None):
        """Recursively convert numpy values and round every float."""
        if isinstance(obj, dict):
            return {str(k): ResultExporter.prepare(v, digits) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [ResultExporter.prepare(v, digits) for v in obj]
        if isinstance(obj, np.ndarray):
            return ResultExporter.prepare(obj.tolist(), digits)
        if isinstance(obj, (bool, np.bool_)):
            return bool(obj)
        if isinstance(obj, (int, np.integer)):
            return int(obj)
        if isinstance(obj, (float, np.floating)):
            return ResultExporter.round_float(obj, digits)
        return obj

    @staticmethod
    def format_number(x: float, digits: Optional[int] = None) -> str:
        value = ResultExporter.round_float(x, digits)
        return value if isinstance(value, str) else repr(value)

    @staticmethod
    def to_json(results, digits: Optional[int] = None) -> str:
        return json.dumps(ResultExporter.prepare(results, digits), indent=2, ensure_ascii=False)

    # ------------------------------------------------------------------ CSV

    @staticmethod
    def _csv(header: Sequence[str], rows: Sequence[Sequence], digits: Optional[int]) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([ResultExporter.format_number(v, digits)
                             if isinstance(v, (float, np.floating)) else v for v in row])
        return buffer.getvalue()

    @staticmethod
    def gram_csv(labels: Sequence[str], matrix, digits: Optional[int] = None) -> str:
        rows = [[label] + [float(v) for v in row] for label, row in zip(labels, np.asarray(matrix))]
        return ResultExporter._csv([''] + list(labels), rows, digits)

    @staticmethod
    def trajectory_csv(report: Dict, digits: Optional[int] = None) -> str:
        """One row per tail step: ρ_ω to the limit plus each atom's best-partner residuals."""
        atoms = report['star']['atoms']
        header = ['step', 'rho_omega']
        for atom in atoms:
            header += [f"{atom['point']}_distance", f"{atom['point']}_weight"]

        trajectory = report['rho_omega_trajectory']
        rows = []
        for i, step in enumerate(atoms[0]['steps'] if atoms else []):
            row = [step, float(trajectory[step - 1])]
            for atom in atoms:
                row += [float(atom['distance_residuals'][i]), float(atom['weight_residuals'][i])]
            rows.append(row)
        return ResultExporter._csv(header, rows, digits)

    @staticmethod
    def dequantize_csv(rows: List[Dict], digits: Optional[int] = None) -> str:
        header = ['h', 'oplus_h', 'max', 'gap', 'bound']
        return ResultExporter._csv(header, [[float(r[k]) for k in header] for r in rows], digits)

    @staticmethod
    def coupling_csv(coupling: Dict, digits: Optional[int] = None) -> str:
        header = ['j', 'k', 'x', 'y', 'gamma']
        return ResultExporter._csv(header, [[e[k] for k in header] for e in coupling['entries']], digits)

    # ------------------------------------------------------------------ text

    @staticmethod
    def text_report(title: str, results: Dict, digits: Optional[int] = None) -> str:
        """Plain text report: a header and one ``key: value`` line per field, nested blocks indented."""
        content = ["=" * 60, title.upper(), "=" * 60]

        def emit(data, indent: int):
            pad = "  " * indent
            for key, value in data.items():
                if isinstance(value, dict):
                    content.append(f"{pad}{key}:")
                    emit(value, indent + 1)
                elif isinstance(value, list) and value and isinstance(value[0], dict):
                    content.append(f"{pad}{key}:")
                    for item in value:
                        content.append(f"{pad}  -")
                        emit(item, indent + 2)
                else:
                    content.append(f"{pad}{key}: {json.dumps(value)}")

        emit(ResultExporter.prepare(results, digits), 0)
        return "\n".join(content)

    # ------------------------------------------------------------------ files

    @staticmethod
    def save(content: str, filename: Optional[str] = None, extension: str = 'json') -> str:
        """
        Write rendered output under ``Config.OUTPUTS_DIR``.

        Args:
            content: Rendered report
            filename: Optional filename (defaults to timestamp-based name)
            extension: Extension used for the default filename

        Returns:
            Path to the saved file
        """
        try:
            if filename is None:
                timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
                filename = f"idemetric_{timestamp}.{extension}"

            filepath = os.path.join(Config.OUTPUTS_DIR, filename)
            os.makedirs(Config.OUTPUTS_DIR, exist_ok=True)

            with open(filepath, 'w', encoding='utf-8') as f:
                f.write(content if content.endswith("\n") else content + "\n")

            logger.success(f"Report saved to: {filepath}")
            return filepath

        except Exception as e:
            logger.error(f"Error saving report: {str(e)}")
            raise
