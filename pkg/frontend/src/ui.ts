/**
 * DOM view and controller for a tutoring session.
 *
 * Flow: pick an exercise (starts a session and loads its starter code into
 * the editor), edit code, request hints, rate each hint in a blocking
 * dialog, and check the solution against the exercise's tests. One hint
 * request and one check may be in flight at a time; buttons disable while
 * pending.
 */

import { ApiClient, ApiError } from './api';
import type { CheckResult, ExerciseSummary } from './api';
import { SessionStore, validRating } from './state';

const RATING_STATEMENTS: ReadonlyArray<[keyof RatingDraft, string]> = [
    ['clear', 'The hint is clear'],
    ['fits', 'The hint fits my work'],
    ['helpful', 'The hint is helpful'],
];

interface RatingDraft {
    clear: number;
    fits: number;
    helpful: number;
}

function el<K extends keyof HTMLElementTagNameMap>(
    tag: K,
    attrs: Record<string, string> = {},
    text?: string,
): HTMLElementTagNameMap[K] {
    const node = document.createElement(tag);
    for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
    if (text !== undefined) node.textContent = text;
    return node;
}

export class TutorApp {
    readonly store = new SessionStore();
    private exercises: ExerciseSummary[] = [];

    private readonly banner = el('div', { id: 'error-banner', class: 'banner hidden' });
    private readonly picker = el('div', { id: 'exercise-list', class: 'picker' });
    private readonly title = el('h2', { id: 'exercise-title' }, 'Pick an exercise');
    private readonly description = el('pre', { id: 'exercise-description', class: 'description' });
    private readonly editor = el('textarea', {
        id: 'editor',
        class: 'editor',
        spellcheck: 'false',
        rows: '18',
    });
    private readonly hintButton = el('button', { id: 'hint-button', disabled: '' }, 'Get a hint');
    private readonly checkButton = el('button', { id: 'check-button', disabled: '' }, 'Check solution');
    private readonly hintHistory = el('div', { id: 'hint-history', class: 'hints' });
    private readonly checkResults = el('div', { id: 'check-results', class: 'results' });
    private readonly modalOverlay = el('div', { id: 'rating-modal', class: 'overlay hidden' });

    constructor(
        private readonly root: HTMLElement,
        private readonly api: ApiClient,
        /** Confirmation hook, injectable for tests; defaults to window.confirm. */
        private readonly confirmDiscard: (message: string) => boolean = (m) => window.confirm(m),
    ) {}

    async init(): Promise<void> {
        this.root.replaceChildren();
        this.root.append(this.banner, this.picker);

        const workspace = el('div', { class: 'workspace' });
        workspace.append(this.title, this.description, this.editor);

        const buttons = el('div', { class: 'buttons' });
        buttons.append(this.hintButton, this.checkButton);
        workspace.append(buttons, this.hintHistory, this.checkResults);
        this.root.append(workspace, this.modalOverlay);

        this.editor.addEventListener('keydown', (event) => this.handleTab(event));
        this.editor.addEventListener('input', () => {
            this.store.buffer = this.editor.value;
        });
        this.hintButton.addEventListener('click', () => void this.onHint());
        this.checkButton.addEventListener('click', () => void this.onCheck());

        await this.loadExercises();
    }

    private showError(message: string, retry?: () => void): void {
        this.banner.replaceChildren();
        this.banner.classList.remove('hidden');
        this.banner.append(el('span', {}, message));
        if (retry) {
            const button = el('button', { id: 'retry-button' }, 'Retry');
            button.addEventListener('click', () => {
                this.clearError();
                retry();
            });
            this.banner.append(button);
        }
    }

    private clearError(): void {
        this.banner.classList.add('hidden');
        this.banner.replaceChildren();
    }

    async loadExercises(): Promise<void> {
        try {
            this.exercises = await this.api.listExercises();
        } catch (err) {
            this.showError(
                err instanceof ApiError ? err.message : String(err),
                () => void this.loadExercises(),
            );
            return;
        }
        this.clearError();
        this.picker.replaceChildren();
        for (const exercise of this.exercises) {
            const button = el(
                'button',
                { class: 'exercise-option', 'data-exercise': exercise.id },
                exercise.title,
            );
            button.addEventListener('click', () => void this.pickExercise(exercise.id));
            this.picker.append(button);
        }
    }

    async pickExercise(exerciseId: string): Promise<void> {
        const exercise = this.exercises.find((e) => e.id === exerciseId);
        if (!exercise) return;
        if (this.store.sessionActive && this.store.bufferDirty) {
            const ok = this.confirmDiscard(
                'Switching exercises discards your current code. Continue?',
            );
            if (!ok) return;
        }
        let session;
        try {
            session = await this.api.startSession(exerciseId);
        } catch (err) {
            this.showError(err instanceof ApiError ? err.message : String(err));
            return;
        }
        this.store.beginSession(exercise, session);
        this.title.textContent = exercise.title;
        this.description.textContent = exercise.description;
        this.editor.value = exercise.starter_code;
        this.hintHistory.replaceChildren();
        this.checkResults.replaceChildren();
        this.hintButton.removeAttribute('disabled');
        this.checkButton.removeAttribute('disabled');
        this.clearError();
    }

    private handleTab(event: KeyboardEvent): void {
        if (event.key !== 'Tab') return;
        event.preventDefault();
        const start = this.editor.selectionStart ?? 0;
        const end = this.editor.selectionEnd ?? 0;
        this.editor.value = `${this.editor.value.slice(0, start)}    ${this.editor.value.slice(end)}`;
        this.editor.selectionStart = this.editor.selectionEnd = start + 4;
        this.store.buffer = this.editor.value;
    }

    async onHint(): Promise<void> {
        const session = this.store.session;
        if (!session || this.store.hintPending || this.store.ratingFor) return;
        this.store.hintPending = true;
        this.hintButton.setAttribute('disabled', '');
        this.hintButton.textContent = 'Thinking...';
        // The buffer posted is exactly what the student sees right now.
        const source = this.editor.value;
        try {
            const hint = await this.api.requestHint(session.session_id, source);
            this.store.receiveHint(hint);
            this.renderHintHistory();
            this.openRatingModal(hint.hint_id, hint.text);
        } catch (err) {
            this.store.hintPending = false;
            this.showError(err instanceof ApiError ? err.message : String(err));
        } finally {
            this.hintButton.textContent = 'Get a hint';
            if (!this.store.ratingFor) this.hintButton.removeAttribute('disabled');
        }
    }

    private renderHintHistory(): void {
        this.hintHistory.replaceChildren();
        for (const entry of [...this.store.hints].reverse()) {
            const item = el('div', { class: 'hint-entry', 'data-hint': entry.hint_id });
            item.append(el('p', { class: 'hint-text' }, entry.text));
            const status = entry.rated ? 'rated' : entry.skipped ? 'skipped' : 'unrated';
            item.append(el('span', { class: `hint-status ${status}` }, status));
            this.hintHistory.append(item);
        }
    }

    private openRatingModal(hintId: string, hintText: string): void {
        this.hintButton.setAttribute('disabled', '');
        const dialog = el('div', { class: 'modal', role: 'dialog', 'aria-modal': 'true' });
        dialog.append(el('h3', {}, 'Rate this hint'));
        dialog.append(el('p', { class: 'hint-text' }, hintText));

        for (const [key, label] of RATING_STATEMENTS) {
            const row = el('div', { class: 'statement' });
            row.append(el('span', {}, label));
            const scale = el('div', { class: 'scale' });
            for (let value = 1; value <= 5; value += 1) {
                const input = el('input', {
                    type: 'radio',
                    name: `stmt-${key}`,
                    value: String(value),
                    id: `stmt-${key}-${value}`,
                });
                const radioLabel = el('label', { for: `stmt-${key}-${value}` }, String(value));
                scale.append(input, radioLabel);
            }
            row.append(scale);
            dialog.append(row);
        }

        const comment = el('textarea', {
            id: 'rating-comment',
            placeholder: 'Optional comment',
            rows: '2',
        });
        dialog.append(comment);

        const submit = el('button', { id: 'rating-submit' }, 'Submit rating');
        submit.addEventListener('click', () => void this.submitRating(hintId, dialog, comment));
        const skip = el('button', { id: 'rating-skip', class: 'secondary' }, 'Skip rating');
        skip.addEventListener('click', () => this.skipRating(hintId));
        const message = el('p', { id: 'rating-message', class: 'hidden' });
        dialog.append(message, submit, skip);

        this.modalOverlay.replaceChildren(dialog);
        this.modalOverlay.classList.remove('hidden');
    }

    private readDraft(dialog: HTMLElement): RatingDraft | null {
        const values: Partial<RatingDraft> = {};
        for (const [key] of RATING_STATEMENTS) {
            const checked = dialog.querySelector<HTMLInputElement>(
                `input[name="stmt-${key}"]:checked`,
            );
            if (!checked) return null;
            values[key] = Number(checked.value);
        }
        const draft = values as RatingDraft;
        return validRating(draft.clear, draft.fits, draft.helpful) ? draft : null;
    }

    private async submitRating(
        hintId: string,
        dialog: HTMLElement,
        comment: HTMLTextAreaElement,
    ): Promise<void> {
        const message = dialog.querySelector<HTMLElement>('#rating-message');
        const draft = this.readDraft(dialog);
        if (!draft) {
            if (message) {
                message.textContent = 'Please answer all three statements.';
                message.classList.remove('hidden');
            }
            return;
        }
        try {
            await this.api.rateHint(hintId, {
                ...draft,
                comment: comment.value.trim() || undefined,
            });
        } catch (err) {
            if (message) {
                message.textContent = err instanceof ApiError ? err.message : String(err);
                message.classList.remove('hidden');
            }
            return;
        }
        this.store.markRated(hintId);
        this.closeModal();
    }

    private skipRating(hintId: string): void {
        this.store.markSkipped(hintId);
        console.info(`rating skipped for hint ${hintId}`);
        this.closeModal();
    }

    private closeModal(): void {
        this.modalOverlay.classList.add('hidden');
        this.modalOverlay.replaceChildren();
        this.renderHintHistory();
        if (!this.store.hintPending) this.hintButton.removeAttribute('disabled');
    }

    get ratingModalOpen(): boolean {
        return !this.modalOverlay.classList.contains('hidden');
    }

    async onCheck(): Promise<void> {
        const session = this.store.session;
        if (!session || this.store.checkPending) return;
        this.store.checkPending = true;
        this.checkButton.setAttribute('disabled', '');
        this.checkButton.textContent = 'Running tests...';
        try {
            const result = await this.api.check(session.session_id, this.editor.value);
            this.store.lastCheck = result;
            this.renderCheckResult(result);
        } catch (err) {
            this.showError(err instanceof ApiError ? err.message : String(err));
        } finally {
            this.store.checkPending = false;
            this.checkButton.textContent = 'Check solution';
            this.checkButton.removeAttribute('disabled');
        }
    }

    private renderCheckResult(result: CheckResult): void {
        this.checkResults.replaceChildren();
        const summary = el(
            'p',
            { class: result.passed ? 'check-pass' : 'check-fail', id: 'check-summary' },
            result.passed ? 'All tests passed.' : 'Some tests failed.',
        );
        this.checkResults.append(summary);
        const list = el('ul', { class: 'test-list' });
        for (const test of result.per_test) {
            const item = el('li', {
                class: `test ${test.passed ? 'pass' : 'fail'}`,
                'data-test': test.name,
            });
            item.append(el('span', { class: 'test-name' }, test.name));
            item.append(el('span', { class: 'test-verdict' }, test.passed ? 'pass' : 'fail'));
            if (test.timed_out) item.append(el('span', { class: 'badge timeout' }, 'timeout'));
            if (!test.passed && test.stderr) {
                item.append(el('pre', { class: 'stderr' }, test.stderr.slice(0, 400)));
            }
            list.append(item);
        }
        this.checkResults.append(list);
    }
}
