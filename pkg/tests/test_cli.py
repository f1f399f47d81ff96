import csv
import io
import json
import subprocess
import sys

import pytest

from zfphase.cli import dispatch

PLANT = {'domain': 'discrete', 'num': [1, 0], 'den': [1, -1.8, 0.81]}


def run(*argv):
    buf = io.StringIO()
    code = dispatch([str(a) for a in argv], buf)
    return code, buf.getvalue()


def run_json(*argv):
    code, text = run(*argv)
    assert code == 0, text
    return json.loads(text)


@pytest.fixture
def plant_file(tmp_path):
    path = tmp_path / 'plant.json'
    path.write_text(json.dumps(PLANT))
    return path


def test_rho_ct():
    doc = run_json('rho-ct', '--a', 1.6, '--b', 2.25, '--c', 3.36, '--d', 4.725)
    assert abs(doc['angle_deg'] - 31.25) < 0.1
    assert doc['manifest']['subcommand'] == 'rho-ct'
    odd = run_json('rho-ct', '--a', 1.6, '--b', 2.25, '--c', 3.36, '--d', 4.725, '--odd')
    assert abs(odd['angle_deg'] - 56.18) < 0.1


def test_rho_dt_with_achieving():
    doc = run_json('rho-dt', '--a', 0.7, '--b', 0.77501, '--achieving')
    assert abs(doc['angle_deg'] - 76.8) < 0.1
    assert doc['n_max'] == 36
    assert doc['achieving']['pos'] == [-8]


def test_invalid_inputs_exit_2(tmp_path):
    assert run('rho-dt', '--a', 0.7, '--b', 0.6)[0] == 2
    assert run('rho-dt', '--a', 0.7, '--b', 0.7)[0] == 2
    assert run('frobnicate')[0] == 2
    assert run('kpl', '--plant', tmp_path / 'missing.json')[0] == 2
    bad = tmp_path / 'bad.json'
    bad.write_text('{"domain": "discrete", "num": [1]}')
    assert run('nyquist', '--plant', bad)[0] == 2


def test_numerical_failure_exit_1(tmp_path):
    # 1 + G vanishes at w = pi for G = 1/z, so the ideal phase is undefined
    path = tmp_path / 'delay.json'
    path.write_text(json.dumps({'domain': 'discrete', 'num': [1], 'den': [1, 0]}))
    assert run('phase-dump', '--plant', path, '--k', 1.0, '--out', tmp_path / 'x.csv')[0] == 1
    assert run('nyquist', '--plant', path)[0] == 0


def test_nyquist_and_csv(tmp_path, plant_file):
    out = tmp_path / 'locus.csv'
    doc = run_json('nyquist', '--plant', plant_file, '--csv', out, '--grid-points', 501)
    assert abs(doc['k_N'] - 3.61) < 1e-6
    rows = list(csv.reader(out.open()))
    assert rows[0] == ['omega', 're', 'im', 'phase_deg'] and len(rows) == 502
    manifest = json.loads((tmp_path / 'locus.csv.manifest.json').read_text())
    assert manifest['outputs'] == [str(out)]


def test_kpl_command(plant_file):
    doc = run_json('kpl', '--plant', plant_file)
    assert abs(doc['k_PL'] - 1.4603) < 0.01
    assert doc['certificate']['klass'] == 'nonodd'


def test_offaxis_commands(plant_file):
    assert abs(run_json('offaxis', 'rd', '--plant', plant_file)['bound'] - 0.8962) < 0.01
    conj = run_json('offaxis', 'conj', '--plant', plant_file, '--k', 2.0)
    assert conj['accepted'] and abs(conj['bound'] - 3.61) < 0.01
    assert run('offaxis', 'ct', '--plant', plant_file)[0] == 2


def test_report_command(plant_file):
    doc = run_json('report', '--plant', plant_file, '--kzf-ref', 1.3028, '--kc-ref', 1.3666)
    assert doc['k_ZF_ref'] < doc['k_C_ref'] < doc['k_PL']


def test_sparse_command():
    doc = run_json('sparse', '--a', 0.7, '--b', 0.7750077494107217, '--eps', 1e-6)
    assert doc['achieving'] == [-8, 9]
    assert abs(doc['integral_ratio'] - doc['rho']) < 1e-3
    assert run('sparse', '--a', 0.7, '--b', 0.8, '--weights', 1, 1, 1)[0] == 2


def test_phase_dump(tmp_path, plant_file):
    out = tmp_path / 'phase.csv'
    code, _ = run('phase-dump', '--plant', plant_file, '--k', 1.5, '--out', out,
                  '--grid-points', 2000)
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 2000
    limited = [r for r in rows if r['limit_angle_deg']]
    assert limited and abs(float(limited[0]['limit_angle_deg']) - 66.72) < 0.05


def test_simulate_command(tmp_path, plant_file):
    nl = tmp_path / 'nl.json'
    nl.write_text(json.dumps({'kind': 'saturation', 'k': 2.1}))
    inputs = tmp_path / 'in.json'
    inputs.write_text(json.dumps({'g': {'kind': 'pulse', 'amplitude': 2.3, 'width': 1}}))
    out = tmp_path / 'sim.csv'
    code, text = run('simulate', '--plant', plant_file, '--nl', nl, '--input', inputs,
                     '--duration', 3000, '--out', out)
    assert code == 0
    summary = json.loads(text)
    assert summary['flags']['periodic'] and not summary['flags']['diverged']
    rows = list(csv.reader(out.open()))
    assert rows[0] == ['t', 'v', 'w'] and len(rows) == 3002


def test_module_entry_point():
    proc = subprocess.run([sys.executable, '-m', 'zfphase', '--version'],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip()
