"""
Stage that turns signals into the feature table.
"""

from ..cohort import write_feature_csv
from ..pipeline import CohortPipeline
from ..stage import Stage, add_output_argument, add_preprocess_arguments, preprocess_config_from, load_stage_manifest


class ExtractStage(Stage):
    """ Extracts the twelve features of every patient in a manifest, writing features.csv. """

    UI_NAME = 'extract'
    UI_DESCRIPTION = 'extract the feature table from preprocessed signals'


    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument('--manifest', default=None, help="manifest of the records to extract features from")
        parser.add_argument('--raw', action='store_true',
            help="the records are raw; preprocess each one before extracting its features")
        add_output_argument(parser, 'features')
        add_preprocess_arguments(parser)


    def run(self):
        manifest = load_stage_manifest(self.settings)
        pipeline = CohortPipeline(preprocess_config_from(self.settings), self.pool)

        if self.settings.raw:
            cohort = pipeline.build_cohort(manifest)
        else:
            cohort = pipeline.extract_preprocessed(manifest)

        path = self.output_path('features.csv')
        write_feature_csv(cohort, path)

        return "extracted features of {} patients ({} passed away) into {}".format(
            len(cohort), int(cohort.labels.sum()), path)
