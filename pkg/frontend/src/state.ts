/**
 * Client-side session state and its transitions.
 *
 * The store holds everything the view renders: the active session, the
 * editor buffer, the hint history with per-hint rated flags, pending
 * request flags, and the last check result. All transitions are pure
 * bookkeeping; network traffic lives in the controller. Nothing here is
 * authoritative - the server's event log can reconstruct all of it.
 */

import type { CheckResult, ExerciseSummary, Hint, Session } from './api';

export interface HintEntry {
    hint_id: string;
    text: string;
    rated: boolean;
    skipped: boolean;
}

export interface SkipRecord {
    hint_id: string;
    at: number;
}

export class SessionStore {
    exercise: ExerciseSummary | null = null;
    session: Session | null = null;
    buffer = '';
    hints: HintEntry[] = [];
    lastCheck: CheckResult | null = null;
    hintPending = false;
    checkPending = false;
    /** Hint currently blocking the UI behind the rating dialog. */
    ratingFor: string | null = null;
    /** Explicit skips, kept locally so no rating is ever lost silently. */
    skips: SkipRecord[] = [];
    error: string | null = null;

    get sessionActive(): boolean {
        return this.session !== null;
    }

    get bufferDirty(): boolean {
        return this.exercise !== null && this.buffer !== this.exercise.starter_code;
    }

    beginSession(exercise: ExerciseSummary, session: Session): void {
        this.exercise = exercise;
        this.session = session;
        this.buffer = exercise.starter_code;
        this.hints = [];
        this.lastCheck = null;
        this.ratingFor = null;
        this.hintPending = false;
        this.checkPending = false;
        this.error = null;
    }

    /** A new hint arrives unrated and immediately opens the rating dialog. */
    receiveHint(hint: Hint): void {
        this.hints.push({ hint_id: hint.hint_id, text: hint.text, rated: false, skipped: false });
        this.ratingFor = hint.hint_id;
        this.hintPending = false;
    }

    markRated(hintId: string): void {
        const entry = this.hints.find((h) => h.hint_id === hintId);
        if (entry) entry.rated = true;
        if (this.ratingFor === hintId) this.ratingFor = null;
    }

    markSkipped(hintId: string): void {
        const entry = this.hints.find((h) => h.hint_id === hintId);
        if (entry) entry.skipped = true;
        this.skips.push({ hint_id: hintId, at: Date.now() });
        if (this.ratingFor === hintId) this.ratingFor = null;
    }

    get unratedCount(): number {
        return this.hints.filter((h) => !h.rated && !h.skipped).length;
    }
}

export function validRating(clear: number, fits: number, helpful: number): boolean {
    return [clear, fits, helpful].every((v) => Number.isInteger(v) && v >= 1 && v <= 5);
}
