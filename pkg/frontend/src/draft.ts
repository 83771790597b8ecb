import { ApiError } from "./api.js";
import type { PredictResponse } from "./types.js";

export type PredictFn = (players: string[]) => Promise<PredictResponse>;

export interface DraftView {
  selected: string[];
  verdict: PredictResponse | null;
  pending: boolean;
  error: string | null;
  blocked: string | null;
}

/**
 * Lineup draft state: up to five selections, a verdict only while five are
 * selected, and at most one in-flight predict whose response is dropped if a
 * later edit superseded it (request sequence number).
 */
export class LineupDraft {
  private selected: string[] = [];
  private verdict: PredictResponse | null = null;
  private pending = false;
  private error: string | null = null;
  private blocked: string | null = null;
  private seq = 0;
  predictCalls = 0;

  constructor(
    private readonly predict: PredictFn,
    private readonly eligible: Set<string>,
    private readonly onChange: (view: DraftView) => void = () => {},
  ) {}

  view(): DraftView {
    return {
      selected: [...this.selected],
      verdict: this.verdict,
      pending: this.pending,
      error: this.error,
      blocked: this.blocked,
    };
  }

  private emit(): void {
    this.onChange(this.view());
  }

  /** Any roster edit invalidates the verdict and any in-flight request. */
  private invalidate(): void {
    this.seq += 1;
    this.verdict = null;
    this.pending = false;
    this.error = null;
  }

  select(player: string): void {
    this.blocked = null;
    if (!this.eligible.has(player)) {
      this.blocked = `${player} is not eligible (insufficient prior-season minutes)`;
      this.emit();
      return;
    }
    if (this.selected.includes(player)) {
      this.blocked = `${player} is already in the lineup`;
      this.emit();
      return;
    }
    if (this.selected.length >= 5) {
      this.blocked = "lineup already has five players";
      this.emit();
      return;
    }
    this.invalidate();
    this.selected.push(player);
    if (this.selected.length === 5) {
      this.firePredict();
    }
    this.emit();
  }

  remove(player: string): void {
    const at = this.selected.indexOf(player);
    if (at < 0) return;
    this.blocked = null;
    this.invalidate();
    this.selected.splice(at, 1);
    this.emit();
  }

  /** Replace one player: exactly one new predict fires on the fifth slot. */
  swap(outgoing: string, incoming: string): void {
    this.remove(outgoing);
    this.select(incoming);
  }

  private firePredict(): void {
    const mySeq = this.seq;
    this.pending = true;
    this.predictCalls += 1;
    this.predict([...this.selected]).then(
      (response) => {
        if (mySeq !== this.seq) return; // superseded by a later edit
        this.pending = false;
        this.verdict = response;
        this.emit();
      },
      (err) => {
        if (mySeq !== this.seq) return;
        this.pending = false;
        this.error = err instanceof ApiError ? err.detail : String(err);
        this.emit();
      },
    );
  }
}
