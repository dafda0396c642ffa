"""
Stage that recomputes ROC curves from an evaluation report.
"""

import json

from ..errors import UsageError
from ..evaluation import auc, roc_curve, roc_frame
from ..stage import Stage, add_output_argument, write_frame


class RocStage(Stage):
    """ Sweeps the threshold over each model's pooled cross-validation scores; writes roc_<model>.csv. """

    UI_NAME = 'roc'
    UI_DESCRIPTION = 'compute ROC curves and AUC from an evaluation report'


    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument('--report', default=None, help="report.json written by the evaluate stage")
        parser.add_argument('--models', nargs='+', default=None, help="only these models [default: every model in the report]")
        add_output_argument(parser, 'roc')


    def run(self):
        settings = self.settings
        if not settings.report:
            raise UsageError("no report given; pass --report")

        with open(settings.report) as f:
            entries = json.load(f)['models']

        if settings.models:
            missing = sorted(set(settings.models) - {entry['variant'] for entry in entries})
            if missing:
                raise UsageError("report has no results for: {}".format(', '.join(missing)))
            entries = [entry for entry in entries if entry['variant'] in settings.models]

        areas = []
        for entry in entries:
            points = roc_curve(entry['pooled']['scores'], entry['pooled']['labels'])
            write_frame(roc_frame(points), self.output_path('roc_{}.csv'.format(entry['variant'])))
            areas.append("{} {:.4f}".format(entry['variant'], auc(points)))

        return "wrote {} ROC curve(s); AUC: {}".format(len(entries), ', '.join(areas))
