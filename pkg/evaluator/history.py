"""
Experiment Run Log

Every direct power vs wreath product run, completed or failed, appended to a
JSON file under data/. A record keeps the run arguments, the budget, the
evaluation backend and the side values next to the full report, so the log
can be scanned without reopening reports.
"""
import json
import logging
import os

import config

logger = logging.getLogger(__name__)

COMPLETED = 'completed'
FAILED = 'failed'
BACKEND = 'optimizer'


def _side_values(report):
    if not report:
        return None
    check = report.get('cross_check') or {}
    return {
        't0': report.get('t0', {}).get('value'),
        't1': report.get('t1', {}).get('value'),
        'cross_check': check.get('value'),
    }


class ExperimentHistory:
    """Append-only log of experiment runs, trimmed to the newest `limit`."""

    def __init__(self, history_file=None, limit=None):
        """
        Args:
            history_file: JSON file path, default config.EXPERIMENT_HISTORY_FILE
            limit: Records kept, default config.EXPERIMENT_HISTORY_LIMIT
        """
        self.history_file = history_file or config.EXPERIMENT_HISTORY_FILE
        self.limit = limit or config.EXPERIMENT_HISTORY_LIMIT

    def load_history(self):
        """Records in insertion order; a missing or unreadable file is an empty log."""
        try:
            with open(self.history_file, 'r', encoding='utf-8') as f:
                records = json.load(f)
        except FileNotFoundError:
            return []
        except json.JSONDecodeError as exc:
            logger.warning("Ignoring unreadable run log %s: %s", self.history_file, exc)
            return []
        return records if isinstance(records, list) else []

    def _append(self, record):
        records = self.load_history()
        records.append(record)
        records = records[-self.limit:]
        os.makedirs(os.path.dirname(os.path.abspath(self.history_file)), exist_ok=True)
        with open(self.history_file, 'w', encoding='utf-8') as f:
            json.dump(records, f, indent=2)
        logger.debug("Logged %s run %s", record['status'], record['id'])

    def create_record(self, started_at, completed_at, report, status=COMPLETED, errors=None,
                      trigger='manual', run=None, budget=None):
        """
        Append one run.

        Args:
            started_at, completed_at: Run boundaries (datetime)
            report: Experiment report, or None for a run that failed before producing one
            status: 'completed' or 'failed'
            errors: Error messages of a failed run
            trigger: What started the run (manual, cli, test)
            run: Run arguments (group, k, m, cross_check); read from the report when omitted
            budget: EvalBudget dict; read from the report provenance when omitted

        Returns:
            The stored record
        """
        provenance = (report or {}).get('provenance', {})
        record = {
            'id': f"run_{started_at.strftime('%Y%m%d_%H%M%S_%f')}",
            'started_at': started_at.isoformat(),
            'completed_at': completed_at.isoformat(),
            'duration_seconds': int((completed_at - started_at).total_seconds()),
            'status': status,
            'trigger': trigger,
            'run': run if run is not None else provenance.get('args', {}),
            'budget': budget if budget is not None else provenance.get('budget'),
            'backend': BACKEND,
            'values': _side_values(report),
            'errors': list(errors or []),
            'report': report,
        }
        self._append(record)
        return record

    def record_failure(self, started_at, completed_at, error, run, budget, trigger='manual'):
        """Append a failed run with the error that ended it."""
        return self.create_record(started_at, completed_at, None, status=FAILED,
                                  errors=[f"{type(error).__name__}: {error}"],
                                  trigger=trigger, run=run, budget=budget)

    def get_recent_runs(self, limit=10):
        return sorted(self.load_history(), key=lambda r: r['started_at'], reverse=True)[:limit]

    def get_last_run(self):
        recent = self.get_recent_runs(1)
        return recent[0] if recent else None

    def get_statistics(self):
        """Run counts by status, mean duration and the largest t1 - t0 seen."""
        records = self.load_history()
        completed = [r for r in records if r['status'] == COMPLETED]
        stats = {
            'total_runs': len(records),
            'completed_runs': len(completed),
            'failed_runs': sum(r['status'] == FAILED for r in records),
            'average_duration_seconds': 0,
            'largest_gap': None,
        }
        if not records:
            return stats
        stats['average_duration_seconds'] = int(
            sum(r.get('duration_seconds', 0) for r in records) / len(records))
        stats['first_run'] = min(r['started_at'] for r in records)
        stats['last_run'] = max(r['started_at'] for r in records)
        gaps = [r['values']['t1'] - r['values']['t0'] for r in completed
                if r.get('values') and None not in (r['values']['t0'], r['values']['t1'])]
        if gaps:
            stats['largest_gap'] = max(gaps)
        return stats


def format_duration(seconds):
    """'59s', '1m 1s' or '1h 1m'."""
    seconds = int(seconds)
    if seconds < 60:
        return f"{seconds}s"
    if seconds < 3600:
        return f"{seconds // 60}m {seconds % 60}s"
    return f"{seconds // 3600}h {(seconds % 3600) // 60}m"
