"""
File formats: curve text files, JSON path manifests and gradient dumps,
CSV traces and landscape grids, SVG arrow plots.

Every writer goes through :func:`atomic_write`, so a crash never leaves a
half-written output behind.
"""

import json
import os
import tempfile
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np

from .curves import Chain, PathOfChains
from .gradient import GradientField
from .metric import ElasticParams

__all__ = ['atomic_write', 'format_curve', 'parse_curve', 'save_curve', 'load_polygon',
           'save_path', 'load_path', 'save_gradient', 'load_gradient', 'save_trace',
           'save_landscape', 'load_landscape', 'gradient_svg']

FLOAT_FMT = '%.17g'


def atomic_write(path, text):
    """Write text to a sibling temp file, then rename it over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f'.{path.name}.', suffix='.tmp')
    try:
        with os.fdopen(fd, 'w', encoding='utf-8') as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --- curves -----------------------------------------------------------------

def format_curve(vertices, comment=None):
    lines = [f'# {c}' for c in (comment.splitlines() if comment else [])]
    lines += [f'{FLOAT_FMT % x},{FLOAT_FMT % y}' for x, y in np.asarray(vertices, dtype=float)]
    return '\n'.join(lines) + '\n'


def parse_curve(text, source='<string>'):
    pts = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith('#'):
            continue
        parts = line.split(',')
        if len(parts) != 2:
            raise ValueError(f'{source}:{lineno}: expected "x,y", got {line!r}')
        try:
            pts.append((float(parts[0]), float(parts[1])))
        except ValueError:
            raise ValueError(f'{source}:{lineno}: not a number in {line!r}') from None
    if len(pts) < 3:
        raise ValueError(f'{source}: need at least 3 vertices, found {len(pts)}')
    arr = np.array(pts)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f'{source}: non-finite coordinates')
    return arr


def save_curve(path, chain, comment=None):
    verts = chain.vertices if isinstance(chain, Chain) else chain
    atomic_write(path, format_curve(verts, comment))


def load_polygon(path):
    """Vertices of a curve file as an (m, 2) array (not resampled)."""
    return parse_curve(Path(path).read_text(encoding='utf-8'), str(path))


# --- paths ------------------------------------------------------------------

def save_path(path, pop, params=None, slice_files=False, extra=None):
    """JSON manifest {n, N_t, a, b, T, slices}.

    Slices are inline vertex lists, or with ``slice_files`` separate curve
    files next to the manifest (``<stem>_slice_<j>.txt``).
    """
    path = Path(path)
    params = params or ElasticParams()
    doc = {'n': pop.n, 'N_t': pop.n_t, 'a': params.a, 'b': params.b, 'T': pop.T}
    if extra:
        doc.update(extra)
    if slice_files:
        names = []
        for j, verts in enumerate(pop.vertices):
            name = f'{path.stem}_slice_{j:03d}.txt'
            save_curve(path.parent / name, verts)
            names.append(name)
        doc['slices'] = names
    else:
        doc['slices'] = pop.vertices.tolist()
    atomic_write(path, json.dumps(doc, indent=1) + '\n')


def load_path(path):
    """Returns (PathOfChains, ElasticParams, manifest dict)."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding='utf-8'))
    except json.JSONDecodeError as exc:
        raise ValueError(f'{path}: not a JSON path manifest ({exc})') from None
    for key in ('n', 'N_t', 'slices'):
        if key not in doc:
            raise ValueError(f'{path}: manifest lacks {key!r}')
    slices = []
    for j, item in enumerate(doc['slices']):
        verts = load_polygon(path.parent / item) if isinstance(item, str) else np.asarray(item, float)
        if verts.shape != (doc['n'], 2):
            raise ValueError(f'{path}: slice {j} has shape {verts.shape}, expected ({doc["n"]}, 2)')
        slices.append(verts)
    if len(slices) != doc['N_t'] + 1:
        raise ValueError(f'{path}: {len(slices)} slices listed, N_t = {doc["N_t"]}')
    params = ElasticParams(doc.get('a', 1.0), doc.get('b', 1.0))
    return PathOfChains(np.stack(slices), doc.get('T', 1.0)), params, doc


# --- gradients --------------------------------------------------------------

_GRAD_ARRAYS = ('z', 'beta', 'xi', 'm', 'mdot', 'h', 'slice_norms')


def save_gradient(path, grad, params=None, extra=None):
    doc = {'energy': grad.energy, 'dt': grad.dt, 'order': grad.order, 'norm': grad.norm}
    if params is not None:
        doc.update(a=params.a, b=params.b)
    if extra:
        doc.update(extra)
    for name in _GRAD_ARRAYS:
        doc[name] = getattr(grad, name).tolist()
    atomic_write(path, json.dumps(doc) + '\n')


def load_gradient(path):
    doc = json.loads(Path(path).read_text(encoding='utf-8'))
    arrays = {name: np.asarray(doc[name], dtype=float) for name in _GRAD_ARRAYS}
    return GradientField(energy=doc['energy'], dt=doc['dt'], order=doc['order'], **arrays)


# --- tables -----------------------------------------------------------------

def save_trace(path, iters, energies):
    rows = ['iter,E'] + [f'{int(i)},{FLOAT_FMT % e}' for i, e in zip(iters, energies)]
    atomic_write(path, '\n'.join(rows) + '\n')


def save_landscape(path, us, vs, grid):
    """Matrix CSV: header row ``u\\v,v_0,..``; each later row starts with its u."""
    grid = np.asarray(grid, dtype=float)
    rows = ['u\\v,' + ','.join(FLOAT_FMT % v for v in vs)]
    for u, row in zip(us, grid):
        rows.append(FLOAT_FMT % u + ',' + ','.join(FLOAT_FMT % e for e in row))
    atomic_write(path, '\n'.join(rows) + '\n')


def load_landscape(path):
    lines = [ln for ln in Path(path).read_text(encoding='utf-8').splitlines() if ln.strip()]
    vs = np.array([float(x) for x in lines[0].split(',')[1:]])
    body = np.array([[float(x) for x in ln.split(',')] for ln in lines[1:]])
    return body[:, 0], vs, body[:, 1:]


# --- SVG --------------------------------------------------------------------

def gradient_svg(pop, grad, uniform=True, slices=None, arrow=0.35, width_per_slice=160):
    """SVG of the slices with arrows -z at the vertices.

    With ``uniform`` every arrow shares one scale (the largest arrow of the
    whole path gets length ``arrow`` in curve units); otherwise each slice
    is normalized on its own.  Returns the XML text.
    """
    slices = list(range(pop.n_t + 1)) if slices is None else list(slices)
    z = -np.asarray(grad.z)
    lengths = np.linalg.norm(z, axis=-1)
    top = lengths.max()
    cell = 0.6
    px = width_per_slice / cell
    svg = ET.Element('svg', xmlns='http://www.w3.org/2000/svg', version='1.1',
                     width=str(width_per_slice * len(slices)), height=str(width_per_slice),
                     viewBox=f'0 0 {cell * len(slices)} {cell}')
    shared = ET.SubElement(svg, 'g', id='slices', transform=f'translate(0,{cell}) scale(1,-1)')
    for col, j in enumerate(slices):
        verts = pop.vertices[j] - pop.vertices[j].mean(axis=0)
        peak = top if uniform else lengths[j].max()
        scale = arrow / peak if peak > 0 else 0.0
        g = ET.SubElement(shared, 'g', id=f'slice{j}',
                          transform=f'translate({cell * (col + 0.5)},{cell / 2})')
        pts = ' '.join(f'{x:.6f},{y:.6f}' for x, y in verts)
        ET.SubElement(g, 'polygon', points=pts, fill='none', stroke='black',
                      attrib={'stroke-width': f'{1.0 / px:.5f}'})
        for (x, y), (dx, dy) in zip(verts, z[j] * scale):
            if dx == 0 and dy == 0:
                continue
            ET.SubElement(g, 'line', x1=f'{x:.6f}', y1=f'{y:.6f}', x2=f'{x + dx:.6f}',
                          y2=f'{y + dy:.6f}', stroke='crimson',
                          attrib={'stroke-width': f'{0.8 / px:.5f}'})
    return ET.tostring(svg, encoding='unicode', xml_declaration=True) + '\n'
