import os
import shutil
import tempfile
import unittest

from confinium.config import ENV_GRID_N, RunConfig, env_grid_n, read_config_file, resolve
from confinium.errors import ConfigError, ParameterError
from confinium.model import Kind


class TestConfig(unittest.TestCase):
    def setUp(self):
        self.test_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.test_dir)

    def write(self, name, content):
        path = os.path.join(self.test_dir, name)
        with open(path, "w") as f:
            f.write(content)
        return path

    def test_key_value_file(self):
        path = self.write("run.conf", "# comment\nsystem = hicha\nrc = 1   # wall\nk=3\ngrid-n = 128\nliterature = yes\n")
        self.assertEqual(read_config_file(path),
                         {"system": "hicha", "rc": 1.0, "k": 3.0, "grid_n": 128, "literature": True})

    def test_yaml_file(self):
        path = self.write("run.yaml", "system: spcha\nV0: 2\nrc: inf\nstates: [1s, 2s]\nenergies_only: true\n")
        data = read_config_file(path)
        self.assertEqual(data["V0"], 2.0)
        self.assertEqual(data["rc"], float("inf"))
        self.assertEqual(data["states"], ["1s", "2s"])
        self.assertIs(data["energies_only"], True)

    def test_unknown_key(self):
        with self.assertRaises(ConfigError):
            read_config_file(self.write("run.conf", "colour = blue\n"))

    def test_bad_value(self):
        with self.assertRaises(ConfigError):
            read_config_file(self.write("run.conf", "grid_n = many\n"))
        with self.assertRaises(ConfigError):
            read_config_file(self.write("run.conf", "rc = wide\n"))

    def test_malformed_line(self):
        with self.assertRaises(ConfigError):
            read_config_file(self.write("run.conf", "system cha\n"))

    def test_yaml_must_be_mapping(self):
        with self.assertRaises(ConfigError):
            read_config_file(self.write("run.yml", "- a\n- b\n"))

    def test_missing_file(self):
        with self.assertRaises(ConfigError):
            read_config_file(os.path.join(self.test_dir, "nope.conf"))

    def test_env_grid_n(self):
        self.assertEqual(env_grid_n({ENV_GRID_N: "128"}), 128)
        self.assertIsNone(env_grid_n({}))
        with self.assertRaises(ConfigError):
            env_grid_n({ENV_GRID_N: "lots"})
        with self.assertRaises(ConfigError):
            env_grid_n({ENV_GRID_N: "8"})

    def test_precedence(self):
        path = self.write("run.conf", "system = cha\nstate = 1s\ngrid_n = 96\nrc = 2\n")
        env = {ENV_GRID_N: "64"}

        config = resolve("solve", {"system": "cha", "state": "1s"}, None, env)
        self.assertEqual(config.grid_n, 64)

        config = resolve("solve", {}, path, env)
        self.assertEqual(config.grid_n, 96)
        self.assertEqual(config.params, {"r_c": 2.0})

        config = resolve("solve", {"grid_n": 48, "rc": "3", "state": None}, path, env)
        self.assertEqual(config.grid_n, 48)
        self.assertEqual(config.params, {"r_c": 3.0})
        self.assertEqual(config.state, "1s")

    def test_defaults(self):
        config = resolve("selftest", {}, None, {})
        self.assertEqual(config.grid_n, 256)
        self.assertEqual(config.output, "text")
        self.assertEqual(config.digits, 10)

    def test_validation(self):
        for command, flags in [("solve", {"system": "cha"}),
                               ("solve", {"system": "helium", "state": "1s"}),
                               ("table", {}),
                               ("sweep", {"system": "cha", "param": "r_c"}),
                               ("selftest", {"digits": 40}),
                               ("selftest", {"output": "xml"}),
                               ("selftest", {"jobs": 0})]:
            with self.subTest(command=command, flags=flags):
                with self.assertRaises(ParameterError):
                    resolve(command, flags, None, {})

    def test_system_and_state(self):
        config = resolve("solve", {"system": "cha", "rc": "inf", "state": "2p"}, None, {})
        st = config.parsed_state()
        sys = config.system_spec(ell=st.ell)
        self.assertIs(sys.kind, Kind.CHA)
        self.assertEqual(sys.ell, 1)
        self.assertEqual(config.to_dict()["params"], {"r_c": "inf"})

    def test_policy(self):
        config = RunConfig(command="selftest", grid_n=64, energy_tol=1e-7)
        policy = config.policy()
        self.assertEqual((policy.grid_n, policy.energy_tol), (64, 1e-7))


if __name__ == '__main__':
    unittest.main()
