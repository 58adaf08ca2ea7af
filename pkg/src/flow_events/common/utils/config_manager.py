"""
@brief Utility class to read config files and provide configuration values

After the first instance of this class is initialized, any class can obtain the same instance by calling the static
get_instance function. Every stage of the pipeline owns one section; each default below is the value used in the
reference event study so that a run without a config file reproduces that setup.
"""
import configparser

from flow_events.common.data_types.exceptions import ConfigurationException


class ConfigManager(configparser.ConfigParser):
    """
    This class provides a single entrypoint for all configurable properties,
    """

    __instance = None
    __prop = None

    def __init__(self):
        """
        Constructor

        Creates a ConfigManager object with the default configuration values. Default configurations will be used
        until the set_configs method is called!
        """
        configparser.ConfigParser.__init__(self, interpolation=None)

        # Set default properties
        self.__prop = {}
        self._set_defaults()
        self.file_path = None

    def set_configs(self, f):
        """
        Sets the configuration values to those in the given file. Keys missing from the file keep their defaults.

        Args:
            f (string): Path to a file to read
        """
        self.file_path = f
        with open(f) as file_handle:
            self.read_file(file_handle)

    @staticmethod
    def get_instance():
        """
        Return instance of singleton.

        Returns:
            The current ConfigManager object for this python application
        """
        if ConfigManager.__instance is None:
            ConfigManager.__instance = ConfigManager()
        return ConfigManager.__instance

    @staticmethod
    def reset_instance():
        """Drop the singleton, the next get_instance call starts again from the defaults"""
        ConfigManager.__instance = None

    def get_file_path(self):
        """
        Return file loaded for this configuration

        :return: file path
        """
        return self.file_path

    def get_number(self, section, name, kind=float):
        """
        Read a numeric value

        Args:
            section: config section
            name: key in the section
            kind: int or float
        Returns:
            the converted value, raises ConfigurationException if it is not a number
        """
        value = self.get(section, name)
        try:
            return kind(value)
        except ValueError:
            raise ConfigurationException(f"[{section}] {name} = '{value}' is not a valid {kind.__name__}")

    def get_flag(self, section, name):
        try:
            return self.getboolean(section, name)
        except ValueError:
            raise ConfigurationException(f"[{section}] {name} = '{self.get(section, name)}' is not a boolean")

    def get_list(self, section, name):
        """Comma separated list with surrounding blanks removed, empty entries dropped"""
        return [item.strip() for item in self.get(section, name, fallback="").split(",") if item.strip()]

    def get_range(self, section, name):
        """
        Read a 'lo,hi' pair of integer minutes

        Returns:
            tuple (lo, hi)
        """
        items = self.get_list(section, name)
        try:
            low, high = (int(item) for item in items)
        except ValueError:
            raise ConfigurationException(f"[{section}] {name} must be 'lo,hi' integers, got {items}")
        return low, high

    def _set_defaults(self):
        """
        Used by the constructor to set all ConfigParser defaults

        Establishes a dictionary of sections and then a dictionary of keyword, value association for each section.
        """

        ########################## PATHS ###########################
        self.__prop["paths"] = {"inputs": "", "split_table": "", "output": "flow_events_output"}
        self._set_section_defaults("paths")

        ######################### INGEST ###########################
        self.__prop["ingest"] = {"delimiter": ",", "exclude_outside_sessions": "true"}
        self._set_section_defaults("ingest")

        ######################### DETECT ###########################
        # 4% within 60 minutes, 6 times the average volatility, first 5 and last 60 minutes omitted
        self.__prop["detect"] = {
            "threshold_abs": "0.04",
            "window_max": "60",
            "volatility_multiple": "6",
            "opening_exclusion": "5",
            "closing_exclusion": "60",
            "volatility_reference": "length",
        }
        self._set_section_defaults("detect")

        ######################## DESEASON ##########################
        self.__prop["deseason"] = {"exclude_event_days": "false"}
        self._set_section_defaults("deseason")

        ########################## STUDY ###########################
        self.__prop["study"] = {
            "pre_window": "100",
            "post_window": "200",
            "quantities": "",
            "groups": "sign",
        }
        self._set_section_defaults("study")

        ########################## RELAX ###########################
        self.__prop["relax"] = {"fit_range": "1,300"}
        self._set_section_defaults("relax")

        ########################## SYNTH ###########################
        # an empty seed keeps the seed of the scenario file
        self.__prop["synth"] = {"seed": "", "scenario": "", "mode": "bars"}
        self._set_section_defaults("synth")

        ######################### OUTPUT ###########################
        self.__prop["output"] = {"precision": "6", "delimiter": ","}
        self._set_section_defaults("output")

    def _set_section_defaults(self, section):
        """
        For a section set up the default values.

        Args:
            section: Section to set all the defaults config values for
        """
        self.add_section(section)
        for (key, value) in self.__prop[section].items():
            self.set(section, key, str(value))
