import os

LOG_LEVEL = os.environ.get("DATAGRAVITY_LOG_LEVEL", "WARNING").upper()

# Minimum meaningful separation between a sample point (or kernel) and a data object, meters.
EPSILON_D = float(os.environ.get("DATAGRAVITY_EPSILON_D", "1e-9"))

WORKERS = max(1, int(os.environ.get("DATAGRAVITY_WORKERS", "1")))

REPORT_DIR = os.environ.get("DATAGRAVITY_REPORT_DIR", "generated_reports")

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_DATEFMT = "%Y-%m-%d %H:%M:%S"

PJ = 1e-12
FJ = 1e-15
