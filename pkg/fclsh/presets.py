import json
import os

from .errors import UsageError


class Experiment:
    """
    Experiment class to look up the packaged experiment presets.

    Usage Example:
        exp = Experiment("synthetic-replicate")
        print(exp.has_experiment())
        print(exp.get_radii())
        print(exp.get_plan_for(3))
    """

    __data = None  # Class variable to hold loaded data

    def __init__(self, name: str):
        """
        Initialize an Experiment instance by preset name.

        :param name: Preset name, case-insensitive (e.g. "synthetic-ideal")
        """
        self.name = name.strip()
        if Experiment.__data is None:
            Experiment.__data = self._load_data()
        self.experiment_data = self._get_experiment_data()

    @classmethod
    def _data_file(cls):
        """
        Returns the absolute path to the experiments.json file.

        :return: Absolute file path as string
        """
        current_dir = os.path.dirname(__file__)
        return os.path.abspath(os.path.join(current_dir, "data", "experiments.json"))

    @classmethod
    def _load_data(cls):
        """
        Load the presets once and cache them in the class.

        :return: Dictionary with "defaults" and "experiments" keys
        """
        with open(cls._data_file(), "r", encoding="utf-8") as file:
            return json.load(file)

    @classmethod
    def get_all_experiments_info(cls) -> dict:
        """
        Return the full JSON data of all presets.

        :return: Dictionary containing defaults and experiments
        """
        if cls.__data is None:
            cls.__data = cls._load_data()
        return cls.__data

    @classmethod
    def get_defaults(cls) -> dict:
        """
        Return the library default block.

        :return: Dictionary of default settings
        """
        return dict(cls.get_all_experiments_info()["defaults"])

    @classmethod
    def get_experiment_names(cls) -> list:
        """
        Return a list of all preset names.

        :return: List of names
        """
        return [exp["name"] for exp in cls.get_all_experiments_info()["experiments"]]

    def _get_experiment_data(self) -> dict | None:
        for exp in self.get_all_experiments_info()["experiments"]:
            if exp["name"].lower() == self.name.lower():
                return exp
        return None

    def has_experiment(self) -> bool:
        """
        Check if the preset exists.

        :return: True if the preset exists, False otherwise
        """
        return self.experiment_data is not None

    def require(self) -> "Experiment":
        """
        Return self, or raise UsageError for an unknown preset.

        :return: This experiment
        """
        if not self.has_experiment():
            names = ", ".join(self.get_experiment_names())
            raise UsageError(f"unknown preset {self.name!r} (known: {names})")
        return self

    def get_description(self) -> str:
        if not self.experiment_data:
            return ""
        return self.experiment_data.get("description", "")

    def get_dims(self) -> int | None:
        if not self.experiment_data:
            return None
        return self.experiment_data.get("dims")

    def get_sizes(self) -> list:
        """
        Return the dataset sizes the preset sweeps over.

        :return: List of n values, empty for real datasets
        """
        if not self.experiment_data:
            return []
        return list(self.experiment_data.get("sizes", []))

    def get_query_count(self) -> int:
        if not self.experiment_data:
            return 0
        return int(self.experiment_data.get("queries", 0))

    def get_radii(self) -> list:
        if not self.experiment_data:
            return []
        return list(self.experiment_data.get("radii", []))

    def get_plan_for(self, r: int) -> dict | None:
        """
        Return the preprocessing override for a radius.

        :param r: Query radius
        :return: Dictionary with 'kind' and 't' keys, or None for the automatic plan
        """
        if not self.experiment_data:
            return None
        plan = self.experiment_data.get("plans", {}).get(str(r))
        return dict(plan) if plan else None

    def get_methods(self) -> list:
        if not self.experiment_data:
            return []
        return list(self.experiment_data.get("methods", []))

    def get_deltas(self) -> list:
        if not self.experiment_data:
            return []
        return list(self.experiment_data.get("deltas", []))

    def get_mih_parts(self) -> int | None:
        """
        Return the fixed MIH part count, or None for the ceil(d / log2 n) default.

        :return: Part count or None
        """
        if not self.experiment_data:
            return None
        return self.experiment_data.get("mih_parts")

    def get_planted(self) -> dict:
        """
        Return planted neighbour counts per distance.

        :return: Dictionary mapping distance (int) to points per query
        """
        if not self.experiment_data:
            return {}
        return {int(k): int(v) for k, v in self.experiment_data.get("planted", {}).items()}

    def get_threshold(self) -> float | None:
        if not self.experiment_data:
            return None
        return self.experiment_data.get("threshold")
