"""
Stage that summarizes a feature table by class.
"""

from ..cohort import class_statistics
from ..clinical_types import Outcome
from ..stage import Stage, add_output_argument, load_feature_cohort, write_frame, print_table


class DescribeStage(Stage):
    """ Writes class_statistics.csv: the mean of every feature among patients who passed away and who survived. """

    UI_NAME = 'describe'
    UI_DESCRIPTION = 'per-class feature means of a feature table'


    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument('--data', default=None, help="feature CSV to describe")
        parser.add_argument('--show', action='store_true', help="also print the statistics table")
        add_output_argument(parser, 'statistics')


    def run(self):
        cohort = load_feature_cohort(self.settings.data)

        statistics = class_statistics(cohort)
        write_frame(statistics, self.output_path('class_statistics.csv'), index=True)

        if self.settings.show:
            print_table(statistics.reset_index())

        return "described {} patients: {} passed away, {} survived".format(
            len(cohort), cohort.count(Outcome.PASSED_AWAY), cohort.count(Outcome.SURVIVED))
