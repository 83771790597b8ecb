"""Elite-lineup prediction pipeline: ingestion, order-statistic features,
seven voting subclassifiers, unanimous-consent ensemble, and roster tools."""

__version__ = "0.1.0"

ELITE = "elite"
NOT_ELITE = "not_elite"
