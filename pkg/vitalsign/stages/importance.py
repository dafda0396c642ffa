"""
Stage that ranks the features by how much a decision tree relies on them.
"""

import numpy as np
import pandas as pd

from ..features import FEATURE_NAMES
from ..models import parse_param_assignments
from ..stage import (Stage, add_output_argument, add_seed_argument, add_balance_arguments, balance_config_from,
    add_param_argument, load_feature_cohort, write_frame, print_table)
from .train import fit_on_cohort


def importance_frame(importance, feature_names=FEATURE_NAMES):
    """ Returns per-feature importance, most important first, with 1-based ranks. Ties keep feature order. """

    frame = pd.DataFrame({'feature': list(feature_names), 'importance': np.asarray(importance, dtype=np.float64)})
    frame = frame.sort_values('importance', ascending=False, kind='stable').reset_index(drop=True)
    frame.insert(0, 'rank', np.arange(1, len(frame) + 1))
    return frame


class ImportanceStage(Stage):
    """ Trains a decision tree on a whole feature table; writes predictor importance and the tree's rules. """

    UI_NAME = 'importance'
    UI_DESCRIPTION = 'estimate predictor importance from a decision tree'


    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument('--data', default=None, help="feature CSV to train the tree on")
        add_param_argument(parser, "set a decision tree hyperparameter; may be repeated")
        parser.add_argument('--show', action='store_true', help="also print the importance table")
        add_output_argument(parser, 'importance')
        add_seed_argument(parser)
        add_balance_arguments(parser)


    def run(self):
        settings = self.settings
        cohort = load_feature_cohort(settings.data)

        tree, _, _ = fit_on_cohort(cohort, 'decision_tree', parse_param_assignments(settings.param),
            balance_config_from(settings))

        table = importance_frame(tree.predictor_importance())
        write_frame(table, self.output_path('importance.csv'))

        with open(self.output_path('tree.txt'), 'w') as f:
            f.write("# thresholds are in standardized (z-score) units\n")
            f.write(tree.describe())

        if settings.show:
            print_table(table)

        top = ', '.join(table['feature'][:3])
        return "ranked {} features with a {}-branch tree; most important: {}".format(
            len(table), tree.diagnostics['branches'], top)
