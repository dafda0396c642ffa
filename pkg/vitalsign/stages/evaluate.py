"""
Stage that cross-validates the classifier roster.
"""

from ..classifier import DEFAULT_THRESHOLD
from ..evaluation import DEFAULT_FOLDS, cross_validate_many, metrics_table, roc_frame
from ..models import DEFAULT_ROSTER, ModelSpec, group_params_by_variant, parse_param_assignments
from ..stage import (Stage, add_output_argument, add_seed_argument, add_preprocess_arguments, add_balance_arguments,
    balance_config_from, add_param_argument, build_stage_cohort, write_frame, write_json, print_table)


class EvaluateStage(Stage):
    """ Runs k-fold cross-validation of each requested model and writes report.json, metrics.csv and roc_<model>.csv. """

    UI_NAME = 'evaluate'
    UI_DESCRIPTION = 'cross-validate classifiers and report precision, recall, F1 and AUC'


    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument('--data', default=None, help="feature CSV to evaluate on")
        parser.add_argument('--manifest', default=None,
            help="manifest of raw records; preprocesses and extracts features before evaluating")
        parser.add_argument('--models', nargs='+', default=list(DEFAULT_ROSTER), help="classifier variants to evaluate")
        add_param_argument(parser, "set a model hyperparameter, written variant.name=value; may be repeated")
        parser.add_argument('--folds', type=int, default=DEFAULT_FOLDS, help="number of cross-validation folds")
        parser.add_argument('--unstratified', action='store_true', help="don't stratify folds by outcome")
        parser.add_argument('--threshold', type=float, default=DEFAULT_THRESHOLD,
            help="score at or above which a patient is predicted to pass away")
        parser.add_argument('--show', action='store_true', help="also print the metrics table")
        add_output_argument(parser, 'evaluation')
        add_seed_argument(parser)
        add_balance_arguments(parser)
        add_preprocess_arguments(parser)


    def run(self):
        settings = self.settings

        grouped = group_params_by_variant(parse_param_assignments(settings.param), settings.models)
        specs = [ModelSpec(variant, grouped[variant]) for variant in settings.models]
        balance = balance_config_from(settings)

        cohort = build_stage_cohort(settings, self.pool)
        reports = cross_validate_many(cohort.features, cohort.labels, specs, balance, k=settings.folds,
            seed=settings.seed, threshold=settings.threshold, stratified=not settings.unstratified, pool=self.pool)

        write_json({
            'folds': settings.folds,
            'seed': settings.seed,
            'threshold': settings.threshold,
            'balance': settings.balance,
            'patients': len(cohort),
            'passed_away': int(cohort.labels.sum()),
            'models': [report.to_dict() for report in reports],
        }, self.output_path('report.json'))

        table = metrics_table(reports)
        write_frame(table, self.output_path('metrics.csv'))

        for report in reports:
            write_frame(roc_frame(report.roc_points), self.output_path('roc_{}.csv'.format(report.variant)))

        if settings.show:
            print_table(table)

        best = table.iloc[0]
        return "evaluated {} model(s) on {} patients over {} folds; best F1 {:.4f} ({})".format(
            len(reports), len(cohort), settings.folds, best['F1-score'], best['Classifier'])
