import { ApiError, ExplorerApi } from './api';
import { MoveSummary, StateSummary } from './types';
import { renderMoves, renderState, renderTimeline } from './view';

// One session per tab; every mutation waits for the server's answer and
// re-fetches, so the view never runs ahead of the engine.

class Explorer {
  private api = new ExplorerApi('');
  private sessionId: string | null = null;
  private timeline: string[] = [];

  constructor(private root: HTMLElement) {
    this.renderForm();
  }

  private renderForm(): void {
    const form = document.createElement('form');
    form.innerHTML = `
      <input name="source" size="40" value="a + b | ~a.c" />
      <label><input type="checkbox" name="repl" /> replication (policy A)</label>
      <button type="submit">start session</button>
      <span class="error" role="alert"></span>`;
    form.addEventListener('submit', async ev => {
      ev.preventDefault();
      const source = (form.elements.namedItem('source') as HTMLInputElement).value;
      const repl = (form.elements.namedItem('repl') as HTMLInputElement).checked;
      try {
        const created = await this.api.createSession(
          source, repl ? { replication_policy: 'A' } : {});
        this.sessionId = created.id;
        this.timeline = [];
        await this.refresh(created.state);
      } catch (e) {
        form.querySelector('.error')!.textContent =
          e instanceof ApiError ? `${e.code}: ${e.message}` : String(e);
      }
    });
    this.root.appendChild(form);
    this.root.appendChild(document.createElement('main'));
  }

  private async refresh(state: StateSummary): Promise<void> {
    if (!this.sessionId) return;
    const moves = await this.api.listMoves(this.sessionId);
    const main = this.root.querySelector('main')!;
    main.replaceChildren(
      renderState(document, state, moves),
      renderMoves(document, moves, m => this.apply(m, moves.fingerprint)),
      renderTimeline(document, this.timeline),
    );
    const jump = document.createElement('button');
    jump.textContent = 'show origin';
    jump.addEventListener('click', async () => {
      const o = await this.api.getOrigin(this.sessionId!);
      main.appendChild(renderState(document, o.origin));
    });
    main.appendChild(jump);
  }

  private async apply(m: MoveSummary, fingerprint: string): Promise<void> {
    if (!this.sessionId) return;
    try {
      const applied = await this.api.applyMove(this.sessionId, m.index, fingerprint);
      this.timeline.push(`${m.direction} ${m.ident} ${m.label}`);
      await this.refresh(applied.state);
    } catch (e) {
      if (e instanceof ApiError && e.code === 'stale-move') {
        // someone (another click) changed the state; re-fetch and move on
        const s = await this.api.getState(this.sessionId);
        await this.refresh(s.state);
      } else {
        throw e;
      }
    }
  }
}

new Explorer(document.getElementById('app')!);
