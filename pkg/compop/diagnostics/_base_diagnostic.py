import numpy as np
from abc import ABC, abstractmethod
from ..utils import CompOpException


class _BaseDiagnostic(ABC):
    @abstractmethod
    def __init__(self):
        self.integer_fields = []
        self.float_fields = []
        self.string_fields = []
        self.array_fields = []
        self.fields = []
        self.summary_fields = []
        self.table_fields = []

    #####################################################################
    # Abstract functions for subclasses to implement

    @abstractmethod
    def evaluate(self, phi):
        ...

    #####################################################################
    # Helper functions which are useful for all diagnostics:

    @classmethod
    def get_name(cls):
        return cls.__name__

    @staticmethod
    def _octave_verdict(gaps, values, flat_tol=0.1, slope_tol=0.2, decay_tol=1e-3):
        """Trend of values as the scale parameter gaps -> 0.

        'flat' when the last three octaves vary by less than flat_tol,
        'growing' / 'decaying' when the log-log slope over the last four
        octaves exceeds slope_tol in either direction.
        """
        gaps = np.asarray(gaps, dtype=float)
        values = np.asarray(values, dtype=float)
        if values.size < 4 or not np.all(np.isfinite(values)):
            return 'inconclusive', float('nan')
        peak = float(np.max(np.abs(values)))
        if peak == 0.0 or np.all(np.abs(values[-2:]) <= decay_tol * peak):
            return 'decaying', float('-inf')
        last3 = values[-3:]
        if np.max(last3) - np.min(last3) < flat_tol * np.max(np.abs(last3)):
            return 'flat', 0.0
        tail = np.maximum(np.abs(values[-4:]), np.finfo('float').tiny)
        slope = float(np.polyfit(np.log(1.0 / gaps[-4:]), np.log(tail), 1)[0])
        if slope > slope_tol:
            return 'growing', slope
        if slope < -slope_tol:
            return 'decaying', slope
        return 'inconclusive', slope

    def print_table(self, res, label):
        """Prints the summary row of one evaluation"""
        print('')
        self._row_print([self.get_name() + ': ' + label] + self.summary_fields)
        self._row_print([label] + self._summary_row(res))

    def _summary_row(self, results_):
        vals = []
        for h in self.summary_fields:
            if h in self.float_fields:
                vals.append("{0:1.5g}".format(float(results_[h])))
            elif h in self.integer_fields:
                vals.append("{0:d}".format(int(results_[h])))
            elif h in self.string_fields:
                vals.append(str(results_[h]))
            else:
                raise NotImplementedError("Summary function not implemented for this field type.")
        return vals

    @staticmethod
    def _row_print(*argv):
        """Prints results in an evenly spaced rows, with more space in first row"""
        if len(argv) == 1:
            argv = argv[0]
        to_print = '%-35s' % argv[0]
        for v in argv[1:]:
            to_print += '%-22s' % str(v)
        print(to_print)

    def summary_results(self, res):
        """Returns a simple summary of final results"""
        out = {}
        for h in self.summary_fields:
            out[h] = res[h] if h in self.string_fields else float(res[h])
        return out

    def detailed_results(self, res):
        """Returns all scalar fields and the sequences they were derived from"""
        missing = [h for h in self.fields if h not in res]
        if missing:
            raise CompOpException('Diagnostic %s is missing fields %s' % (self.get_name(), missing))
        return {h: res[h] for h in self.fields}

    def table_rows(self, res):
        """Rows of the per-grid-point table, one column per entry of table_fields"""
        columns = [np.asarray(res[h]) for h in self.table_fields]
        return [list(row) for row in zip(*columns)]
