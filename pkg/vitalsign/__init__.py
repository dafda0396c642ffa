
from .pipeline import CohortPipeline
from .models import train_model, save_model, load_model
from .evaluation import cross_validate, cross_validate_many
